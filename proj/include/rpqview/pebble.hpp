#pragma once

#include "rpqview/csp_template.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <vector>

namespace rpqview {

struct GameConfig {
    int l = 1;
    int k = 2;
    // cap on enumerated (domain, hom) pairs; exceeding it raises
    // ResourceLimit rather than returning a possibly wrong answer
    std::size_t max_positions = 5'000'000;
};

enum class Player { Player1, Player2 };

struct GameResult {
    Player winner = Player::Player2;
    // Player2: a surviving family of partial homomorphisms, one entry per
    // (domain, hom). Player1: a single domain with no surviving hom.
    std::vector<std::pair<std::vector<NodeId>, NodeMap>> surviving_family;
    std::vector<NodeId> empty_domain;
};

/// Existential (l,k)-pebble game on (s, t, u, v): greatest-fixpoint deletion
/// over positions (A, h) with |A| <= k; Player 2 wins iff every |A| <= k has
/// a surviving response. A full homomorphism is searched first (it is a
/// winning Player-2 strategy on its own), so the fixpoint only runs on
/// hom-free positions.
GameResult pebble_solve(const ViewInstance &s, const Template &t, const NodeId &u,
                        const NodeId &v, const GameConfig &cfg);

/// l = |T_{Q,V}| * N(V).
long long default_l(const QuerySpec &q, const ViewSpec &v, const Template &t);

/// { (u,v) : Player 1 wins the (l, l+1)-game } — the evaluation of the
/// canonical Datalog rewriting via the game.
PairSet rewrite_eval(const ViewInstance &s, const Template &t, long long l,
                     std::size_t max_positions = 5'000'000);

} // namespace rpqview
