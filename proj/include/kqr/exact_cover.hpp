#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "kqr/rng.hpp"

namespace kqr {

enum class SolveStatus { Solved, Unsat, Timeout };

/// Exact cover with demands and optional items.
///
/// Primary items must be covered exactly demand[i] times; secondary items
/// at most once. Each option may be chosen up to its max_use. The search
/// branches on an unsatisfied primary item with the fewest placeable
/// options; candidate order is a seed-fixed global permutation, and the
/// subtree below the k-th candidate bans candidates 1..k-1, so the
/// solution space is partitioned and exhaustion is a proof of Unsat.
class ExactCover {
public:
    /// items [0, primary) have demands; items [primary, primary+secondary)
    /// are at-most-once.
    ExactCover(int primary, int secondary) : primary_(primary) {
        rem_.assign(primary, 1);
        cap_.assign(secondary, 1);
    }

    void set_demand(int item, int demand) {
        if (demand < 0) throw std::invalid_argument("ExactCover: negative demand");
        rem_[item] = demand;
    }

    /// items must be distinct; primary and secondary ids may be mixed.
    int add_option(std::vector<int> items, int max_use = 1) {
        opt_items_.push_back(std::move(items));
        max_use_.push_back(max_use);
        return static_cast<int>(opt_items_.size()) - 1;
    }

    struct Result {
        SolveStatus status = SolveStatus::Unsat;
        std::vector<int> chosen;  // option indices, repeated per use
        std::int64_t nodes = 0;
    };

    Result solve(std::uint64_t seed, std::int64_t max_nodes) {
        const int O = static_cast<int>(opt_items_.size());
        uses_.assign(O, 0);
        banned_.assign(O, false);
        // Seed-fixed global option order: candidate lists are sorted by it.
        std::vector<int> order(O);
        std::iota(order.begin(), order.end(), 0);
        Rng rng(seed);
        rng.shuffle(order);
        rank_.assign(O, 0);
        for (int i = 0; i < O; ++i) rank_[order[i]] = i;

        at_item_.assign(primary_, {});
        for (int o = 0; o < O; ++o)
            for (int it : opt_items_[o])
                if (it < primary_) at_item_[it].push_back(o);
        for (auto& lst : at_item_)
            std::sort(lst.begin(), lst.end(), [&](int a, int b) { return rank_[a] < rank_[b]; });

        Result res;
        res.status = SolveStatus::Unsat;
        nodes_ = 0;
        max_nodes_ = max_nodes;
        chosen_.clear();
        bool timeout = false;
        if (search(timeout)) {
            res.status = SolveStatus::Solved;
            res.chosen = chosen_;
        } else if (timeout) {
            res.status = SolveStatus::Timeout;
        }
        res.nodes = nodes_;
        return res;
    }

private:
    bool placeable(int o) const {
        if (banned_[o] || uses_[o] >= max_use_[o]) return false;
        for (int it : opt_items_[o]) {
            if (it < primary_) {
                if (rem_[it] < 1) return false;
            } else if (cap_[it - primary_] < 1) {
                return false;
            }
        }
        return true;
    }

    void place(int o) {
        ++uses_[o];
        for (int it : opt_items_[o]) {
            if (it < primary_) --rem_[it];
            else --cap_[it - primary_];
        }
        chosen_.push_back(o);
    }

    void unplace(int o) {
        --uses_[o];
        for (int it : opt_items_[o]) {
            if (it < primary_) ++rem_[it];
            else ++cap_[it - primary_];
        }
        chosen_.pop_back();
    }

    bool search(bool& timeout) {
        // pick the unsatisfied item with the fewest placeable candidates,
        // counting remaining multi-use capacity
        int best = -1;
        std::int64_t best_count = std::numeric_limits<std::int64_t>::max();
        for (int i = 0; i < primary_; ++i) {
            if (rem_[i] == 0) continue;
            std::int64_t count = 0;
            for (int o : at_item_[i]) {
                if (placeable(o)) count += max_use_[o] - uses_[o];
                if (count >= best_count && count >= rem_[i]) break;
            }
            if (count < rem_[i]) return false;  // dead item
            if (count < best_count) {
                best_count = count;
                best = i;
            }
        }
        if (best < 0) return true;  // all demands met

        std::vector<int> cands;
        for (int o : at_item_[best])
            if (placeable(o)) cands.push_back(o);

        std::vector<int> banned_here;
        bool found = false;
        for (int o : cands) {
            if (++nodes_ > max_nodes_) { timeout = true; break; }
            place(o);
            if (search(timeout)) { found = true; break; }
            unplace(o);
            if (timeout) break;
            // o cannot be the rank-minimal option covering this unit of `best`
            banned_[o] = true;
            banned_here.push_back(o);
        }
        for (int o : banned_here) banned_[o] = false;
        return found;
    }

    int primary_;
    std::vector<int> rem_;
    std::vector<int> cap_;
    std::vector<std::vector<int>> opt_items_;
    std::vector<int> max_use_;
    std::vector<std::vector<int>> at_item_;
    std::vector<int> rank_;
    std::vector<int> uses_;
    std::vector<char> banned_;
    std::vector<int> chosen_;
    std::int64_t nodes_ = 0;
    std::int64_t max_nodes_ = 0;
};

}  // namespace kqr
