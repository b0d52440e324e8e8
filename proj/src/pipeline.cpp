#include "lingram/pipeline.hpp"

namespace lingram {

namespace {
constexpr int kMaxDiscoveryRetries = 6;
}  // namespace

GrammarTree discover_with_retries(const AlphabetSpec& spec, int corpus_max_len,
                                  const DiscoveryLimits& limits,
                                  int* retries_out) {
  validate_spec(spec);
  int corpus =
      corpus_max_len > 0 ? corpus_max_len : 4 * static_cast<int>(spec.period());
  for (int retries = 0;; ++retries) {
    if (retries_out) *retries_out = retries;
    try {
      return discover_grammar(spec, corpus, limits);
    } catch (const DiscoveryLimitError& e) {
      if (e.reason != DiscoveryLimitError::Reason::budget_floor ||
          retries >= kMaxDiscoveryRetries)
        throw;
      corpus += static_cast<int>(spec.period());
    }
  }
}

PipelineResult run_pipeline(const PipelineOptions& opts) {
  DiscoveryLimits limits;
  limits.max_vertices = opts.max_vertices;
  PipelineResult out;
  out.tree = discover_with_retries(opts.spec, opts.corpus_max_len, limits,
                                   &out.discovery_retries);
  out.corpus_max_len = out.tree.corpus_max_len;
  out.report = prove_grammar(out.tree, opts.max_purges);
  out.gf = solve_gf_system(build_gf_system(out.tree)).at(0);
  out.series = series_coefficients(out.gf, opts.series_order);
  return out;
}

std::vector<mpq_class> oracle_series(const AlphabetSpec& spec, int order) {
  std::vector<mpq_class> out;
  out.reserve(static_cast<std::size_t>(order) + 1);
  for (int n = 0; n <= order; ++n)
    out.emplace_back(static_cast<long>(oracle_count(spec, n)));
  return out;
}

}  // namespace lingram
