#include "dotchain/chain.hpp"

#include <cmath>
#include <sstream>

#include "dotchain/analysis.hpp"

namespace dotchain {

void ChainSpec::validate() const {
  if (n_dots < 3) throw InvalidArgument("a chain needs at least three dots");
}

ChainResult n_dot_transfer(const ChainSpec& spec, const LogicalState& initial,
                           const DeviceParams& params) {
  spec.validate();
  initial.validate();
  const ProtocolConfig config =
      std::visit([](const auto& cfg) -> ProtocolConfig { return cfg; }, spec.scheme);
  const DetuningSchedule schedule = build_schedule(params, config);
  const LogicalPropagation step_map =
      propagate_logical_basis(params, schedule, ramp_tolerance(config));

  const int steps = spec.n_dots - 2;
  ChainResult result;
  result.product_fidelity = 1.0;

  // Unnormalized logical amplitudes on the active pair.
  Complex amp_s = std::cos(initial.theta);
  Complex amp_t = std::polar(std::sin(initial.theta), initial.phi);
  for (int k = 0; k < steps; ++k) {
    const double weight = std::sqrt(std::norm(amp_s) + std::norm(amp_t));
    const Complex in_s = amp_s / weight, in_t = amp_t / weight;
    const LogicalState step_input{std::atan2(std::abs(in_t), std::abs(in_s)),
                                  std::abs(in_t) > 0.0 && std::abs(in_s) > 0.0
                                      ? std::arg(in_t) - std::arg(in_s)
                                      : (std::abs(in_s) > 0.0 ? 0.0 : std::arg(in_t))};
    // Global phase of the step input, which LogicalState does not carry.
    const Complex global = std::abs(in_s) > 0.0 ? in_s / std::abs(in_s) : Complex{1.0};

    QubitState out = step_map.apply(step_input);
    out.amps *= global;
    const Complex out_s = out[basis::S23], out_t = out[basis::T23];
    const double retained = std::norm(out_s) + std::norm(out_t);

    TransferResult step = summarize_transfer(step_input, std::move(out), schedule);
    result.product_fidelity *= step.fidelity;
    result.per_step.push_back(std::move(step));
    result.retained_weight.push_back(retained);
    if (retained < 0.5) {
      std::ostringstream msg;
      msg << "chain step " << k + 1 << " kept only " << retained << " of its logical weight";
      throw TransferFailed(msg.str());
    }
    amp_s = weight * out_s;
    amp_t = weight * out_t;
  }

  const double c = std::cos(initial.theta), s = std::sin(initial.theta);
  const Complex overlap = c * amp_s + std::polar(s, -initial.phi) * amp_t;
  result.composed_fidelity = std::norm(overlap);
  result.total_time_ns = static_cast<double>(steps) * result.per_step.front().transfer_time_ns;
  return result;
}

}  // namespace dotchain
