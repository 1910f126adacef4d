#pragma once

#include "ipstat/baselines.hpp"
#include "ipstat/bench.hpp"
#include "ipstat/datagen.hpp"
#include "ipstat/error.hpp"
#include "ipstat/ip_address.hpp"
#include "ipstat/memory_block.hpp"
#include "ipstat/methods.hpp"
#include "ipstat/parallel.hpp"
#include "ipstat/record_io.hpp"
#include "ipstat/ssmb_counter.hpp"
#include "ipstat/tlmb_counter.hpp"
#include "ipstat/topk_heap.hpp"
