#include "recipnet/evaluation.hpp"

#include "recipnet/error.hpp"

namespace recipnet {

EvalReport evaluate(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) throw ArgumentError("predicted and true label counts differ");
  if (truth.empty()) throw ArgumentError("cannot evaluate an empty label set");
  EvalReport r;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int p = predicted[i];
    const int t = truth[i];
    if ((p != 1 && p != -1) || (t != 1 && t != -1)) throw ArgumentError("labels must be +1 or -1");
    if (p == 1) {
      ++(t == 1 ? r.tp : r.fp);
    } else {
      ++(t == 1 ? r.fn : r.tn);
    }
  }
  if (r.tp + r.fp > 0) r.precision = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp);
  if (r.tp + r.fn > 0) r.recall = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn);
  if (r.tp > 0) r.f1 = 2.0 * static_cast<double>(r.tp) / static_cast<double>(2 * r.tp + r.fp + r.fn);
  r.accuracy = static_cast<double>(r.tp + r.tn) / static_cast<double>(r.total());
  return r;
}

}  // namespace recipnet
