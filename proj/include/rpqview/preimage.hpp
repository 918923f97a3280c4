#pragma once

#include "rpqview/rpq.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rpqview {

struct PreimageResult {
    enum class Status { Found, NotFoundWithinBound, BudgetExceeded };
    Status status = Status::NotFoundWithinBound;
    GraphDb db;
    int bound = 0;
};

struct PreimageOptions {
    int max_segment_len = 8;        // word length cap for fresh-interior paths
    std::size_t max_steps = 4'000'000;
};

/// Complete search over candidate databases shaped as unions of paths
/// between instance nodes (fresh interior nodes only), up to max_nodes total
/// nodes and the configured segment-word cap. Found results are re-verified
/// to satisfy apply_view(D) = S exactly before returning.
PreimageResult find_preimage(const ViewInstance &s, const ViewSpec &v,
                             int max_nodes, const PreimageOptions &opts = {});

/// Generic rewriting through a preimage: find D with V(D) = S and return
/// Q(D). Throws NotAViewImage when the bounded search exhausts, and
/// BudgetExceeded when it cannot finish.
PairSet rewrite_via_preimage(const ViewInstance &s, const QuerySpec &q,
                             const ViewSpec &v, int max_nodes,
                             const PreimageOptions &opts = {});

/// The quadratic-size ceiling r * |S|^2 * N(V)^N(V) from the pumping
/// argument, reported as a human-readable note (the Ramsey constant makes it
/// astronomically large; it is never used as a search bound).
std::string preimage_bound_note(const ViewSpec &v, std::size_t instance_size);

/// 3-colorability gadget: sigma = {rg,gr,bg,gb,rb,br}, V1 = those six
/// one-symbol words, V2 = the 24 two-symbol words with mismatched middle
/// colors; the instance has V1 = symmetrized edge set and V2 empty. A
/// preimage exists iff the input graph is 3-colorable.
std::pair<ViewSpec, ViewInstance>
gen_3col(const std::vector<std::pair<std::string, std::string>> &edges);

/// Sound-view counterexample search used by the oracle kit: find D with
/// s ⊆ V(D) edgewise (extra tuples allowed) and (u,v) ∉ Q(D), over the same
/// path-shaped candidate space. Returns the database if one is found.
struct SoundSearchResult {
    enum class Status { Found, NotFound, BudgetExceeded };
    Status status = Status::NotFound;
    GraphDb db;
};
SoundSearchResult sound_counterexample_search(const ViewInstance &s,
                                              const QuerySpec &q,
                                              const ViewSpec &v, const NodeId &u,
                                              const NodeId &v2, int max_nodes,
                                              const PreimageOptions &opts = {});

} // namespace rpqview
