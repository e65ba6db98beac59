#pragma once

#include <array>
#include <string>
#include <vector>

#include "qsym/ensemble.hpp"
#include "qsym/logic.hpp"
#include "qsym/repspace.hpp"

namespace qsym {

struct Example1Model {
    Ensemble ensemble;
    std::vector<int> event_a; // A, in experiment "a"
    std::vector<int> event_b; // B, in experiment "a"
    std::vector<int> event_c; // C, in experiment "b"
};

/// Two-experiment model whose generated proposition poset is not
/// distributive: with A, B covering the sample space of experiment a and C a
/// singleton event of experiment b,
///   (a,A^c) v (b,C^c) = 1,
///   ((a,A) ^ (b,C)) v ((a,B) ^ (b,C)) = 0,  while
///   ((a,A) v (a,B)) ^ (b,C) = (b,C).
/// The two parameters vary on disjoint halves of the four-point state space,
/// and C has probability zero wherever its parameter is constant.
inline Example1Model make_example1() {
    Example1Model m;
    Ensemble& e = m.ensemble;
    e.space = StateSpace::uniform(4);
    e.group = trivial_group(4);

    Experiment a;
    a.name = "a";
    a.outcome_count = 3;
    a.theta = ParametricFunction({0, 1, 2, 2});
    a.prob_table = {{0.4, 0.3, 0.3}, {0.2, 0.5, 0.3}, {0.45, 0.1, 0.45}};
    e.experiments.push_back(a);

    Experiment b;
    b.name = "b";
    b.outcome_count = 2;
    b.theta = ParametricFunction({0, 0, 1, 2});
    b.prob_table = {{0.0, 1.0}, {0.6, 0.4}, {0.3, 0.7}};
    e.experiments.push_back(b);

    m.event_a = {0, 1};
    m.event_b = {1, 2};
    m.event_c = {0};
    return m;
}

struct EnvelopeModel {
    double gamma = 0;
    // joint[c][k]: probability that A's envelope I holds card c (0 = red) and
    // envelope II holds card k (0 = the card "1")
    std::array<std::array<double, 2>, 2> joint{};
    Ensemble ensemble;
};

/// The two-envelope model: the state space indexes the organizer's four
/// hidden assignments, weighted by the correlated joint law. A's two
/// incompatible experiments reveal one envelope each; B's envelopes hold the
/// deterministic complements.
inline EnvelopeModel make_envelope(double gamma) {
    if (!(gamma >= -1.0 && gamma <= 1.0)) throw error("make_envelope: gamma must lie in [-1, 1]");
    EnvelopeModel m;
    m.gamma = gamma;
    m.joint[0][0] = (1 + gamma) / 4; // (red, 1)
    m.joint[0][1] = (1 - gamma) / 4; // (red, 2)
    m.joint[1][0] = (1 - gamma) / 4; // (black, 1)
    m.joint[1][1] = (1 + gamma) / 4; // (black, 2)

    Ensemble& e = m.ensemble;
    e.space.n = 4;
    e.space.labels = {"red1", "red2", "black1", "black2"};
    e.space.nu = {m.joint[0][0], m.joint[0][1], m.joint[1][0], m.joint[1][1]};
    // color swap and number swap on the hidden assignments
    e.group = close_group(4, {{2, 3, 0, 1}, {1, 0, 3, 2}});

    GroupAction flip = close_group(2, {{1, 0}});
    auto deterministic = [&](std::string name, ParametricFunction theta, bool complemented) {
        Experiment ex;
        ex.name = std::move(name);
        ex.outcome_count = 2;
        ex.theta = std::move(theta);
        ex.prob_table = complemented
                            ? std::vector<std::vector<double>>{{0.0, 1.0}, {1.0, 0.0}}
                            : std::vector<std::vector<double>>{{1.0, 0.0}, {0.0, 1.0}};
        ex.sample_group = flip;
        return ex;
    };
    ParametricFunction color({0, 0, 1, 1});
    ParametricFunction number({0, 1, 0, 1});
    e.experiments.push_back(deterministic("A_I", color, false));
    e.experiments.push_back(deterministic("A_II", number, false));
    e.experiments.push_back(deterministic("B_I", color, true));
    e.experiments.push_back(deterministic("B_II", number, true));
    return m;
}

struct ChshReport {
    double gamma = 0;
    double e_ai_bi = 0, e_ai_bii = 0, e_aii_bi = 0, e_aii_bii = 0;
    double s_value = 0;
    bool satisfied = false; // |S| <= 2
};

/// CHSH combination by exact enumeration over the organizer's hidden
/// assignment; +1 codes red and the card "1" on each side's own envelopes.
inline ChshReport bell_chsh(double gamma) {
    EnvelopeModel m = make_envelope(gamma);
    ChshReport rep;
    rep.gamma = gamma;
    auto sign_color = [](int phi) { return phi < 2 ? 1.0 : -1.0; };   // A's envelope I
    auto sign_number = [](int phi) { return phi % 2 == 0 ? 1.0 : -1.0; }; // A's envelope II
    for (int phi = 0; phi < 4; ++phi) {
        double w = m.ensemble.space.nu[phi];
        double ai = sign_color(phi), aii = sign_number(phi);
        double bi = -ai, bii = -aii; // B holds the complements
        rep.e_ai_bi += w * ai * bi;
        rep.e_ai_bii += w * ai * bii;
        rep.e_aii_bi += w * aii * bi;
        rep.e_aii_bii += w * aii * bii;
    }
    rep.s_value = rep.e_ai_bi + rep.e_ai_bii + rep.e_aii_bi - rep.e_aii_bii;
    rep.satisfied = std::abs(rep.s_value) <= 2.0 + 1e-12;
    return rep;
}

struct S3StructureReport {
    Perm color_swap, number_swap, envelope_swap;
    std::size_t generated_order = 0;
    bool order_divides_24 = false;
    std::size_t quotient_order = 0;      // S4 modulo the double-transposition subgroup
    bool quotient_nonabelian = false;
    bool quotient_is_s3 = false;
    Mat block_basis;                     // 4 x 2, invariant block of the permutation rep
    bool block_invariant = false;
    int block_commutant_dim = 0;         // 1 iff the block is irreducible
    bool ok() const {
        return order_divides_24 && quotient_is_s3 && block_invariant && block_commutant_dim == 1;
    }
};

/// The three envelope transformations as permutations of the hidden
/// assignments, the order-6 noncommutative quotient of the full symmetric
/// group on those assignments, and an irreducible two-dimensional invariant
/// block of the generated permutation representation.
inline S3StructureReport make_s3_structure() {
    S3StructureReport rep;
    rep.color_swap = {2, 3, 0, 1};    // red <-> black in both assignments
    rep.number_swap = {1, 0, 3, 2};   // card 1 <-> card 2
    rep.envelope_swap = {0, 2, 1, 3}; // exchange the roles of envelopes I and II

    GroupAction generated = close_group(4, {rep.color_swap, rep.number_swap, rep.envelope_swap});
    rep.generated_order = generated.size();
    rep.order_divides_24 = 24 % generated.size() == 0;

    // quotient of S4 by the normal closure of the two commuting swaps
    GroupAction s4 = symmetric_group(4);
    GroupAction v = close_group(4, {rep.color_swap, rep.number_swap});
    bool normal = true;
    for (const Perm& g : s4.elements)
        for (const Perm& h : v.elements)
            if (v.index_of(compose(compose(g, h), inverse(g))) < 0) normal = false;
    if (normal) {
        // cosets of v in s4
        std::vector<std::vector<int>> cosets;
        std::vector<int> coset_of(s4.size(), -1);
        for (std::size_t i = 0; i < s4.size(); ++i) {
            if (coset_of[i] >= 0) continue;
            std::vector<int> c;
            for (const Perm& h : v.elements) {
                int j = s4.index_of(compose(s4.elements[i], h));
                coset_of[j] = static_cast<int>(cosets.size());
                c.push_back(j);
            }
            cosets.push_back(std::move(c));
        }
        rep.quotient_order = cosets.size();
        for (std::size_t a = 0; a < cosets.size() && !rep.quotient_nonabelian; ++a)
            for (std::size_t b = 0; b < cosets.size(); ++b) {
                int ab = coset_of[s4.index_of(
                    compose(s4.elements[cosets[a][0]], s4.elements[cosets[b][0]]))];
                int ba = coset_of[s4.index_of(
                    compose(s4.elements[cosets[b][0]], s4.elements[cosets[a][0]]))];
                if (ab != ba) { rep.quotient_nonabelian = true; break; }
            }
        rep.quotient_is_s3 = rep.quotient_order == 6 && rep.quotient_nonabelian;
    }

    // invariant two-dimensional block: differences across the envelope-swap axis
    rep.block_basis = Mat::Zero(4, 2);
    rep.block_basis(0, 0) = 1.0 / std::sqrt(2.0);
    rep.block_basis(3, 0) = -1.0 / std::sqrt(2.0);
    rep.block_basis(2, 1) = 1.0 / std::sqrt(2.0);
    rep.block_basis(1, 1) = -1.0 / std::sqrt(2.0);
    std::vector<double> nu(4, 1.0);
    std::vector<RepOperator> ops = regular_rep(generated, nu);
    Subspace block;
    block.basis = rep.block_basis;
    rep.block_invariant = check_invariant(block, ops, nu);

    // commutant dimension on the block: solutions of b R(u) = R(u) b
    std::vector<Mat> restricted;
    for (const RepOperator& op : ops) restricted.push_back(block.basis.adjoint() * op.matrix * block.basis);
    Eigen::MatrixXcd system(4 * restricted.size(), 4);
    for (std::size_t g = 0; g < restricted.size(); ++g) {
        const Mat& r = restricted[g];
        // vec(b r - r b) as a linear map of vec(b), column-major vec
        for (int col = 0; col < 4; ++col) {
            Mat basis_elem = Mat::Zero(2, 2);
            basis_elem(col % 2, col / 2) = 1.0;
            Mat image = basis_elem * r - r * basis_elem;
            for (int row = 0; row < 4; ++row) system(4 * g + row, col) = image(row % 2, row / 2);
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(system);
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > 1e-10) ++rank;
    rep.block_commutant_dim = 4 - rank;
    return rep;
}

} // namespace qsym
