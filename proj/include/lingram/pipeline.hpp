#pragma once

// End-to-end orchestration: discover a grammar, certify it, and solve for
// the weight-enumerator of the language, with the discovery retry policy in
// one place so every front end behaves identically.

#include <gmpxx.h>

#include <vector>

#include "lingram/discovery.hpp"
#include "lingram/gfsolve.hpp"
#include "lingram/prover.hpp"

namespace lingram {

struct PipelineOptions {
  AlphabetSpec spec;
  int corpus_max_len = 0;  // 0 means the default of four periods
  int max_purges = 3;
  int max_vertices = 10000;
  int series_order = 20;
};

struct PipelineResult {
  GrammarTree tree;
  ProofReport report;
  RationalFunction gf;              // the root vertex's weight-enumerator
  std::vector<mpq_class> series;    // coefficients 0..series_order
  int corpus_max_len = 0;           // the corpus bound that finally succeeded
  int discovery_retries = 0;
};

// Discovery with the standard retry policy: budget-floor failures grow the
// corpus by one period and retry, up to six times; vertex-cap failures are
// final and propagate as DiscoveryLimitError. retries_out, when given,
// receives the number of retries taken.
GrammarTree discover_with_retries(const AlphabetSpec& spec, int corpus_max_len,
                                  const DiscoveryLimits& limits,
                                  int* retries_out = nullptr);

// Discover (with retries), prove, solve, expand the series.
PipelineResult run_pipeline(const PipelineOptions& opts);

// Exact good-word counts for lengths 0..order from the brute-force oracle,
// shaped for coefficient-by-coefficient comparison with a series expansion.
std::vector<mpq_class> oracle_series(const AlphabetSpec& spec, int order);

}  // namespace lingram
