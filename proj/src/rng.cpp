#include "varcast/rng.hpp"

#include "varcast/distributions.hpp"

namespace varcast::stats {

double Rng::next_normal() { return normal_quantile(next_open()); }

}  // namespace varcast::stats
