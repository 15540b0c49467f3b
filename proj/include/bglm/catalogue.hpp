#pragma once

// The supported family of method triples, together with the published
// iteration parameters used by the self-check mode of the analyze command.

#include <vector>

#include "bglm/construction.hpp"

namespace bglm::catalogue {

struct Entry {
    int k, r, ell;
};

/// The eight supported triples, ordered by k.
const std::vector<Entry>& triples();

/// Triple for a given order, or throws InvalidTriple.
Entry entry_for_order(int k);

/// Reference (gamma, rho_tilde, rho_inf, rho_star) for a catalogue order and
/// auxiliary-point choice (1 = geometric, 2 = rational), 4-decimal values.
struct ReferenceRow {
    int k, r, r_minus_ell;
    double gamma, rho_tilde, rho_inf, rho_star;
};

const std::vector<ReferenceRow>& reference_rows(int choice_num);

/// Assembled tableau with gamma filled, for a catalogue order.
construction::GlmTableau method_for_order(int k, int choice_num);

} // namespace bglm::catalogue
