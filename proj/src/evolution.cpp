#include "dotchain/evolution.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace dotchain {

void LogicalState::validate() const {
  if (!std::isfinite(theta) || !std::isfinite(phi)) {
    throw InvalidArgument("logical state angles must be finite");
  }
  if (theta < 0.0 || theta > kPi) throw InvalidArgument("theta must lie in [0, pi]");
}

QubitState LogicalState::initial() const {
  QubitState s;
  s[basis::S12] = std::cos(theta);
  s[basis::T12] = std::polar(std::sin(theta), phi);
  return s;
}

QubitState LogicalState::target() const {
  QubitState s;
  s[basis::S23] = std::cos(theta);
  s[basis::T23] = std::polar(std::sin(theta), phi);
  return s;
}

ScheduleSegment ScheduleSegment::constant(const DetuningVector& eps, double duration_ps) {
  ScheduleSegment seg{duration_ps, eps, eps, SegmentKind::Constant};
  seg.validate();
  return seg;
}

ScheduleSegment ScheduleSegment::ramp(const DetuningVector& from, const DetuningVector& to,
                                      double duration_ps) {
  ScheduleSegment seg{duration_ps, from, to, SegmentKind::LinearRamp};
  seg.validate();
  return seg;
}

DetuningVector ScheduleSegment::at(double s) const {
  if (kind == SegmentKind::Constant) return eps_start;
  return eps_start + s * (eps_end - eps_start);
}

void ScheduleSegment::validate() const {
  if (!std::isfinite(duration_ps) || duration_ps < 0.0) {
    throw InvalidArgument("segment duration must be non-negative and finite");
  }
  if (kind == SegmentKind::LinearRamp && duration_ps == 0.0) {
    throw InvalidArgument("ramp duration must be positive");
  }
  if (!eps_start.allFinite() || !eps_end.allFinite()) {
    throw InvalidArgument("segment detunings must be finite");
  }
  if (kind == SegmentKind::Constant && eps_start != eps_end) {
    throw InvalidArgument("constant segment must have equal start and end detunings");
  }
}

DetuningSchedule::DetuningSchedule(std::vector<ScheduleSegment> segments) {
  for (const auto& s : segments) append(s);
}

DetuningSchedule& DetuningSchedule::append(const ScheduleSegment& segment) {
  segment.validate();
  segments_.push_back(segment);
  return *this;
}

double DetuningSchedule::total_duration_ps() const {
  double total = 0.0;
  for (const auto& s : segments_) total += s.duration_ps;
  return total;
}

DetuningVector DetuningSchedule::final_detuning() const {
  if (segments_.empty()) throw InvalidArgument("empty schedule has no final detuning");
  return segments_.back().eps_end;
}

namespace {

// One Newton-Schulz step towards the nearest unitary. Long ramps chain millions
// of nearly identical eigenbases, so their residual non-orthogonality would
// otherwise add up coherently in the norm.
template <typename Matrix>
void polish_orthonormal(Matrix& v) {
  const Matrix gram = v.adjoint() * v;
  v = v * (1.5 * Matrix::Identity() - 0.5 * gram);
}

}  // namespace

template <typename Scalar>
BlockPropagator<Scalar>::BlockPropagator(const HamiltonianBlocks<Scalar>& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, kSingletDim, kSingletDim>> ss(h.singlet);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, kTripletDim, kTripletDim>> ts(h.triplet);
  if (ss.info() != Eigen::Success || ts.info() != Eigen::Success) {
    throw NonConvergence("Hermitian eigendecomposition did not converge");
  }
  s_vec_ = ss.eigenvectors();
  s_energy_ = ss.eigenvalues();
  t_vec_ = ts.eigenvectors();
  polish_orthonormal(s_vec_);
  polish_orthonormal(t_vec_);
  t_energy_ = ts.eigenvalues();
}

namespace {

template <int N, typename Vectors, typename Energies, typename Block>
void evolve_block(const Vectors& vecs, const Energies& energies, double duration_ps,
                  Block&& block) {
  Eigen::Matrix<Complex, N, 1> coeff = vecs.adjoint() * block;
  for (int i = 0; i < N; ++i) coeff(i) *= std::polar(1.0, -energies(i) * duration_ps / kHbar);
  block = vecs * coeff;
}

}  // namespace

template <typename Scalar>
void BlockPropagator<Scalar>::apply(StateVector& amps, double duration_ps) const {
  if (duration_ps == 0.0) return;  // exact identity, no eigenbasis round trip
  evolve_block<kSingletDim>(s_vec_, s_energy_, duration_ps, amps.head<kSingletDim>());
  evolve_block<kTripletDim>(t_vec_, t_energy_, duration_ps, amps.tail<kTripletDim>());
}

template class BlockPropagator<Complex>;
template class BlockPropagator<double>;

QubitState propagate_constant(const QubitState& state, const DeviceParams& params,
                              const DetuningVector& eps, double duration_ps) {
  if (!std::isfinite(duration_ps) || duration_ps < 0.0) {
    throw InvalidArgument("propagation duration must be non-negative");
  }
  QubitState out = state;
  BlockPropagator<Complex>(build_hamiltonian<Complex>(params, eps)).apply(out.amps, duration_ps);
  out.time_ps += duration_ps;
  return out;
}

QubitState propagate_ramp_fixed(const QubitState& state, const DeviceParams& params,
                                const ScheduleSegment& segment, std::uint64_t substeps) {
  if (substeps == 0) throw InvalidArgument("substep count must be positive");
  const double dt = segment.duration_ps / static_cast<double>(substeps);
  QubitState out = state;
  for (std::uint64_t k = 0; k < substeps; ++k) {
    const double mid = (static_cast<double>(k) + 0.5) / static_cast<double>(substeps);
    // Constructed entries are real, so the real-symmetric solver suffices here.
    BlockPropagator<double>(build_hamiltonian<double>(params, segment.at(mid))).apply(out.amps, dt);
  }
  out.time_ps += segment.duration_ps;
  return out;
}

QubitState propagate_ramp(const QubitState& state, const DeviceParams& params,
                          const ScheduleSegment& segment, double tol, RampReport* report) {
  if (!(tol > 0.0)) throw InvalidArgument("ramp tolerance must be positive");
  std::uint64_t n = 1;
  QubitState prev = propagate_ramp_fixed(state, params, segment, n);
  for (;;) {
    n *= 2;
    if (n > kMaxRampSubsteps) {
      std::ostringstream msg;
      msg << "ramp of " << segment.duration_ps << " ps did not converge to tol " << tol
          << " within " << kMaxRampSubsteps << " substeps";
      throw NonConvergence(msg.str());
    }
    QubitState cur = propagate_ramp_fixed(state, params, segment, n);
    const double change = (cur.amps - prev.amps).norm();
    if (change < tol) {
      if (report) *report = {n, change};
      return cur;
    }
    prev = std::move(cur);
  }
}

QubitState propagate_schedule(const QubitState& state, const DeviceParams& params,
                              const DetuningSchedule& schedule, double tol) {
  QubitState out = state;
  for (const auto& seg : schedule.segments()) {
    if (seg.kind == SegmentKind::Constant) {
      if (seg.duration_ps == 0.0) continue;
      out = propagate_constant(out, params, seg.eps_start, seg.duration_ps);
    } else {
      out = propagate_ramp(out, params, seg, tol);
    }
  }
  return out;
}

}  // namespace dotchain
