#include "bglm/catalogue.hpp"

#include "bglm/blended.hpp"

namespace bglm::catalogue {

const std::vector<Entry>& triples() {
    static const std::vector<Entry> t = {
        {3, 2, 2},  {4, 4, 3},  {6, 5, 4},  {8, 6, 5},
        {10, 7, 6}, {12, 9, 7}, {14, 10, 8}, {16, 11, 9},
    };
    return t;
}

Entry entry_for_order(int k) {
    for (const Entry& e : triples())
        if (e.k == k) return e;
    throw InvalidTriple("no catalogue method of order " + std::to_string(k));
}

const std::vector<ReferenceRow>& reference_rows(int choice_num) {
    static const std::vector<ReferenceRow> geometric = {
        {3, 2, 0, 0.7223, 0.2272, 0.4355, 0.1573},
        {4, 4, 1, 0.6195, 0.3802, 0.9908, 0.3069},
        {6, 5, 1, 0.6063, 0.5734, 1.5600, 0.4729},
        {8, 6, 1, 0.5769, 0.6380, 1.9170, 0.5530},
        {10, 7, 1, 0.5502, 0.6626, 2.1887, 0.6021},
        {12, 9, 2, 0.5271, 0.7345, 2.6438, 0.6968},
        {14, 10, 2, 0.5127, 0.7366, 2.8022, 0.7183},
        {16, 11, 2, 0.4999, 0.7345, 2.9393, 0.7347},
    };
    static const std::vector<ReferenceRow> rational = {
        {3, 2, 0, 0.7223, 0.2272, 0.4355, 0.1573},
        {4, 4, 1, 0.6249, 0.3827, 0.9801, 0.3062},
        {6, 5, 1, 0.6082, 0.5740, 1.5520, 0.4719},
        {8, 6, 1, 0.5778, 0.6381, 1.9113, 0.5522},
        {10, 7, 1, 0.5507, 0.6625, 2.1845, 0.6015},
        {12, 9, 2, 0.5274, 0.7345, 2.6407, 0.6964},
        {14, 10, 2, 0.5130, 0.7366, 2.7998, 0.7180},
        {16, 11, 2, 0.5000, 0.7345, 2.9374, 0.7344},
    };
    return choice_num == 1 ? geometric : rational;
}

construction::GlmTableau method_for_order(int k, int choice_num) {
    const Entry e = entry_for_order(k);
    return blended::make_method(e.k, e.r, e.ell, choice_num);
}

} // namespace bglm::catalogue
