#pragma once

// CSV and JSON views of results. Doubles are written with 17 significant
// digits so repeated runs are byte-identical.

#include <ostream>
#include <string>

#include "json.hpp"

#include "dotchain/analysis.hpp"
#include "dotchain/chain.hpp"

namespace dotchain {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSweepCsvHeader =
    "theta,phi,delta_u_mev,fidelity,infidelity,leakage_total,transfer_time_ns";

std::string format_double(double v);

void write_sweep_csv(std::ostream& out, const SweepTable& table);
Json to_json(const SweepTable& table);

void write_trace_csv(std::ostream& out, const FreeEvolutionTrace& trace);
Json to_json(const FreeEvolutionTrace& trace);

Json to_json(const DeviceParams& params);
Json to_json(const DetuningSchedule& schedule);
Json to_json(const QubitState& state);
Json to_json(const TransferResult& result, const LogicalState& logical);
Json to_json(const ChainResult& result);
Json to_json(const EffectiveCouplings& couplings);

}  // namespace dotchain
