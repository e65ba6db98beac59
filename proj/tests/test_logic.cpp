#include <catch2/catch_amalgamated.hpp>

#include "qsym/builtin.hpp"
#include "qsym/logic.hpp"
#include "testsupport.hpp"

using namespace qsym;

namespace {

Ensemble binary_ensemble() {
    Ensemble e;
    e.space = StateSpace::uniform(4);
    e.group = trivial_group(4);
    Experiment ex;
    ex.name = "c";
    ex.outcome_count = 2;
    ex.theta = ParametricFunction({0, 0, 1, 1});
    ex.prob_table = {{0.8, 0.2}, {0.3, 0.7}};
    e.experiments.push_back(ex);
    return e;
}

Ensemble two_binary_ensemble() {
    Ensemble e = binary_ensemble();
    Experiment ex;
    ex.name = "d";
    ex.outcome_count = 2;
    ex.theta = ParametricFunction({0, 1, 0, 1});
    ex.prob_table = {{0.9, 0.1}, {0.75, 0.25}};
    e.experiments.push_back(ex);
    return e;
}

} // namespace

TEST_CASE("proposition profiles read through theta") {
    Ensemble e = binary_ensemble();
    Proposition p = proposition_of(e.experiments[0], {0});
    REQUIRE(profile_eq(p.profile, {0.8, 0.8, 0.3, 0.3}));
    REQUIRE(profile_eq(proposition_of(e.experiments[0], {}).profile, {0, 0, 0, 0}));
    REQUIRE(profile_eq(proposition_of(e.experiments[0], {0, 1}).profile, {1, 1, 1, 1}));
}

TEST_CASE("ordering is pointwise dominance") {
    Ensemble e = binary_ensemble();
    Proposition zero = proposition_of(e.experiments[0], {});
    Proposition p = proposition_of(e.experiments[0], {0});
    REQUIRE(leq(zero, p));
    REQUIRE_FALSE(leq(p, zero));

    // a product event sits below its factor
    Experiment prod = product_experiment(e.experiments[0], e.experiments[0]);
    Proposition joint = proposition_of(prod, {0}); // (0,0)
    REQUIRE(leq(joint, p));

    Proposition q1, q2;
    q1.profile = {0.8, 0.3};
    q2.profile = {0.9, 0.2};
    REQUIRE_FALSE(leq(q1, q2));
    REQUIRE_FALSE(leq(q2, q1));
}

TEST_CASE("orthocomplement is an involution and complements the event") {
    Ensemble e = binary_ensemble();
    Proposition p = proposition_of(e.experiments[0], {0});
    Proposition c = orthocomplement(p);
    REQUIRE(profile_eq(c.profile, {0.2, 0.2, 0.7, 0.7}));
    REQUIRE(c.origin.event == std::vector<int>{1});
    Proposition cc = orthocomplement(c);
    REQUIRE(profile_eq(cc.profile, p.profile));
    REQUIRE(cc.origin.event == p.origin.event);

    Proposition zero = proposition_of(e.experiments[0], {});
    REQUIRE(profile_eq(orthocomplement(zero).profile, {1, 1, 1, 1}));

    // order reversal
    Proposition full = proposition_of(e.experiments[0], {0, 1});
    REQUIRE(leq(p, full));
    REQUIRE(leq(orthocomplement(full), orthocomplement(p)));
}

TEST_CASE("orthogonality is the bounded profile sum") {
    Ensemble e = binary_ensemble();
    Proposition p = proposition_of(e.experiments[0], {0});
    REQUIRE(is_orthogonal({p, orthocomplement(p)}));

    // disjoint events of one experiment are orthogonal
    Experiment three;
    three.name = "t";
    three.outcome_count = 3;
    three.theta = constant_function(2);
    three.prob_table = {{0.2, 0.3, 0.5}};
    REQUIRE(is_orthogonal({proposition_of(three, {0}), proposition_of(three, {1})}));

    // three constant-1/2 profiles: pairwise orthogonal, not jointly
    Proposition h;
    h.profile = {0.5, 0.5};
    REQUIRE(is_orthogonal({h, h}));
    REQUIRE_FALSE(is_orthogonal({h, h, h}));
}

TEST_CASE("assumption-1 scan flags the constant-half triple") {
    Proposition h1, h2, h3;
    h1.profile = h2.profile = h3.profile = {0.5, 0.5};
    h1.origin.note = "a";
    h2.origin.note = "b";
    h3.origin.note = "c";
    auto rep = check_assumption1({h1, h2, h3});
    REQUIRE_FALSE(rep.ok());
    REQUIRE(rep.violations.front().members == std::vector<int>{0, 1, 2});

    // single-experiment binary algebra is clean
    Ensemble e = binary_ensemble();
    std::vector<Proposition> algebra;
    for (int mask = 0; mask < 4; ++mask) {
        std::vector<int> ev;
        for (int x = 0; x < 2; ++x)
            if (mask >> x & 1) ev.push_back(x);
        algebra.push_back(proposition_of(e.experiments[0], ev));
    }
    REQUIRE(check_assumption1(algebra).ok());

    // {p, p-perp, 0} is clean
    Proposition p = proposition_of(e.experiments[0], {0});
    REQUIRE(check_assumption1({p, orthocomplement(p), proposition_of(e.experiments[0], {})}).ok());
}

TEST_CASE("synthesize_joint realizes orthogonal families as disjoint events") {
    Ensemble e = two_binary_ensemble();
    Proposition p = proposition_of(e.experiments[0], {1}); // (0.2, 0.2, 0.7, 0.7)

    // k = 1: a two-outcome experiment (q, 1-q)
    auto single = synthesize_joint({p});
    REQUIRE(single.experiment.outcome_count == 2);
    Proposition back = proposition_of(single.experiment, single.events[0]);
    REQUIRE(profile_eq(back.profile, p.profile));

    // {p, p-perp} exhausts a binary synthetic experiment
    auto pair = synthesize_joint({p, orthocomplement(p)});
    REQUIRE(pair.experiment.outcome_count == 2);

    // two orthogonal propositions from distinct experiments
    Proposition q = proposition_of(e.experiments[1], {1}); // (0.1, 0.25, 0.1, 0.25)
    REQUIRE(is_orthogonal({p, q}));
    auto joint = synthesize_joint({p, q});
    REQUIRE(joint.experiment.outcome_count == 3);
    REQUIRE(profile_eq(proposition_of(joint.experiment, joint.events[0]).profile, p.profile));
    REQUIRE(profile_eq(proposition_of(joint.experiment, joint.events[1]).profile, q.profile));

    // appending the synthetic experiment keeps the ensemble valid
    Ensemble extended = e;
    extended.experiments.push_back(joint.experiment);
    REQUIRE(validate_ensemble(extended).ok());

    Proposition one = proposition_of(e.experiments[0], {0, 1});
    REQUIRE_THROWS_AS(synthesize_joint({one, one}), error);
}

TEST_CASE("sup_orthogonal adds profiles exactly") {
    Ensemble e = binary_ensemble();
    Proposition p = proposition_of(e.experiments[0], {1});
    Proposition zero = proposition_of(e.experiments[0], {});
    REQUIRE(profile_eq(sup_orthogonal(p, zero).profile, p.profile));
    REQUIRE(profile_eq(sup_orthogonal(p, orthocomplement(p)).profile, {1, 1, 1, 1}));

    Proposition a, b;
    a.profile = {0.3, 0.1};
    a.theta = identity_function(2);
    b.profile = {0.2, 0.4};
    b.theta = identity_function(2);
    Proposition s = sup_orthogonal(a, b);
    REQUIRE(s.profile[0] == 0.3 + 0.2);
    REQUIRE(s.profile[1] == 0.1 + 0.4);

    Proposition one = proposition_of(e.experiments[0], {0, 1});
    REQUIRE_THROWS_AS(sup_orthogonal(one, p), error);
}

TEST_CASE("build_poset deduplicates and closes") {
    // single binary experiment: 4 propositions
    Ensemble e = binary_ensemble();
    PropositionPoset ps = build_poset(e);
    REQUIRE(ps.size() == 4);
    REQUIRE(ps.zero_id >= 0);
    REQUIRE(ps.one_id >= 0);

    // two binary experiments: 8 raw events, 6 after identification of 0 and 1
    PropositionPoset ps2 = build_poset(two_binary_ensemble(), {false, 4096});
    REQUIRE(ps2.size() == 6);
    REQUIRE(build_poset(two_binary_ensemble()).size() >= 6);

    // cap error names the cap
    Ensemble ex1 = make_example1().ensemble;
    try {
        build_poset(ex1, {true, 16});
        FAIL("expected the cap error");
    } catch (const error& err) {
        REQUIRE(std::string(err.what()).find("16") != std::string::npos);
    }
}

TEST_CASE("mutually dominating propositions share one canonical id") {
    for (std::uint64_t seed : {0, 1, 2, 3}) {
        PropositionPoset ps = build_poset(test::random_rational_ensemble(seed));
        for (int i = 0; i < ps.size(); ++i)
            for (int j = i + 1; j < ps.size(); ++j)
                if (ps.leq_ids(i, j) && ps.leq_ids(j, i)) FAIL("distinct ids with equal profiles");
    }
}

TEST_CASE("orthocomplement laws hold inside generated posets") {
    // via the orthogonal-sum route, p v p-perp = 1 and p ^ p-perp = 0 hold for
    // every element of every closed poset
    for (std::uint64_t seed : {0, 1, 2}) {
        PropositionPoset ps = build_poset(test::random_rational_ensemble(seed));
        for (int i = 0; i < ps.size(); ++i) {
            std::vector<double> sum(ps.props[i].profile.size());
            for (std::size_t t = 0; t < sum.size(); ++t) sum[t] = 1.0; // q + (1 - q)
            REQUIRE(ps.find(sum) == ps.one_id);
        }
    }
    // on an assumption-1-clean algebra the dominance meets and joins agree
    PropositionPoset ps = build_poset(binary_ensemble());
    for (int i = 0; i < ps.size(); ++i) {
        std::vector<double> c(ps.props[i].profile.size());
        for (std::size_t t = 0; t < c.size(); ++t) c[t] = 1.0 - ps.props[i].profile[t];
        int ci = ps.find(c);
        REQUIRE(ci >= 0); // closure provides the complement
        REQUIRE(ps.meet_in_poset(i, ci) == ps.zero_id);
        REQUIRE(ps.join_in_poset(i, ci) == ps.one_id);
        // order reversal against every comparable partner
        for (int j = 0; j < ps.size(); ++j) {
            if (!ps.leq_ids(i, j)) continue;
            std::vector<double> cj(c.size());
            for (std::size_t t = 0; t < c.size(); ++t) cj[t] = 1.0 - ps.props[j].profile[t];
            int cji = ps.find(cj);
            REQUIRE(cji >= 0);
            REQUIRE(ps.leq_ids(cji, ci));
        }
    }
}

TEST_CASE("De Morgan holds for generated meets and joins") {
    PropositionPoset ps = build_poset(two_binary_ensemble());
    auto comp = [&](int i) {
        std::vector<double> c(ps.props[i].profile.size());
        for (std::size_t t = 0; t < c.size(); ++t) c[t] = 1.0 - ps.props[i].profile[t];
        return ps.find(c);
    };
    for (int i = 0; i < ps.size(); ++i)
        for (int j = 0; j < ps.size(); ++j) {
            int join = ps.join_in_poset(i, j);
            int meet_c = ps.meet_in_poset(comp(i), comp(j));
            if (join >= 0 && meet_c >= 0) REQUIRE(comp(join) == meet_c);
        }
}

TEST_CASE("orthomodularity holds on closed posets from valid ensembles") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Ensemble e = test::random_rational_ensemble(seed);
        REQUIRE(validate_ensemble(e).ok());
        PropositionPoset ps = build_poset(e);
        auto rep = check_orthomodular(ps);
        INFO("seed " << seed << " poset " << ps.size());
        REQUIRE(rep.ok());
        REQUIRE(rep.pairs_checked > 0);
    }
}

TEST_CASE("a corrupted supremum profile breaks orthomodularity with a witness") {
    PropositionPoset ps = build_poset(binary_ensemble());
    // perturb the complement-of-{0} profile; the chain for (0, {0}) needs it
    Proposition target = orthocomplement(proposition_of(binary_ensemble().experiments[0], {0}));
    int idx = ps.find(target.profile);
    REQUIRE(idx >= 0);
    ps.props[idx].profile[0] += 0.05;
    auto rep = check_orthomodular(ps);
    REQUIRE_FALSE(rep.ok());
}

TEST_CASE("single-experiment algebras are distributive") {
    PropositionPoset ps = build_poset(binary_ensemble());
    auto rep = check_distributive(ps);
    REQUIRE(rep.ok());
    REQUIRE(rep.triples_checked == 1LL * ps.size() * ps.size() * ps.size());
}

TEST_CASE("sup_general") {
    Ensemble e = two_binary_ensemble();
    Proposition p = proposition_of(e.experiments[0], {1});

    // singleton set: the proposition itself
    Proposition s = sup_general(e, {p});
    REQUIRE(profile_eq(s.profile, p.profile));

    // orthogonal pair with {0,1}-valued profiles: matches the orthogonal sup
    EnvelopeModel env = make_envelope(0.0);
    Proposition red = proposition_of(env.ensemble.experiments[0], {0});
    Proposition black = proposition_of(env.ensemble.experiments[0], {1});
    Proposition both = sup_general(env.ensemble, {red, black});
    REQUIRE(profile_eq(both.profile, sup_orthogonal(red, black).profile));

    // for general profiles the construction dominates every input and is the
    // pointwise-minimal theta-measurable dominator
    Proposition q = proposition_of(e.experiments[1], {1});
    Proposition sg = sup_general(e, {p, q});
    for (int phi = 0; phi < e.n(); ++phi) {
        REQUIRE(sg.profile[phi] >= p.profile[phi] - eps_p);
        REQUIRE(sg.profile[phi] >= q.profile[phi] - eps_p);
        REQUIRE(sg.profile[phi] <= std::max(p.profile[phi], q.profile[phi]) + eps_p);
    }

    // disjoint-support complements force the supremum to be the unit
    // (two-point model: each experiment is informative on its own half)
    Ensemble half;
    half.space = StateSpace::uniform(2);
    half.group = trivial_group(2);
    Experiment a;
    a.name = "a";
    a.outcome_count = 3;
    a.theta = ParametricFunction({1, 0});
    a.prob_table = {{0, 0, 1}, {0.3, 0.4, 0.3}};
    half.experiments.push_back(a);
    Experiment b;
    b.name = "b";
    b.outcome_count = 2;
    b.theta = ParametricFunction({0, 1});
    b.prob_table = {{0, 1}, {0.6, 0.4}};
    half.experiments.push_back(b);
    REQUIRE(validate_ensemble(half).ok());
    Proposition a_comp = proposition_of(half.experiments[0], {2});      // A^c, A = {0,1}
    Proposition c_comp = proposition_of(half.experiments[1], {1});      // C^c, C = {0}
    Proposition sup1 = sup_general(half, {a_comp, c_comp});
    REQUIRE(profile_eq(sup1.profile, {1.0, 1.0}));

    // a non-permissible join is rejected
    Ensemble sym = e;
    sym.group = cyclic_group(4);
    Experiment bad;
    bad.name = "bad";
    bad.outcome_count = 2;
    bad.theta = ParametricFunction({1, 0, 0, 0});
    bad.prob_table = {{0.9, 0.1}, {0.2, 0.8}};
    sym.experiments.push_back(bad);
    Proposition pb = proposition_of(bad, {0});
    REQUIRE_THROWS_AS(sup_general(sym, {pb}), error);
}

TEST_CASE("sup_orthogonal is the least upper bound on clean posets") {
    // binary algebra: p v p-perp = 1 is minimal
    PropositionPoset ps = build_poset(binary_ensemble());
    for (int i = 0; i < ps.size(); ++i)
        for (int j = i; j < ps.size(); ++j) {
            bool orth = true;
            for (std::size_t t = 0; t < ps.props[i].profile.size(); ++t)
                if (ps.props[i].profile[t] + ps.props[j].profile[t] > 1 + eps_p) orth = false;
            if (!orth) continue;
            std::vector<double> sum(ps.props[i].profile.size());
            for (std::size_t t = 0; t < sum.size(); ++t)
                sum[t] = ps.props[i].profile[t] + ps.props[j].profile[t];
            int sid = ps.find(sum);
            REQUIRE(sid >= 0);
            // least among dominating elements
            for (int r = 0; r < ps.size(); ++r)
                if (ps.leq_ids(i, r) && ps.leq_ids(j, r)) REQUIRE(ps.leq_ids(sid, r));
        }

    // {0,1}-valued profiles: union events of the envelope model
    PropositionPoset env = build_poset(make_envelope(0.0).ensemble);
    for (int i = 0; i < env.size(); ++i)
        for (int j = i + 1; j < env.size(); ++j) {
            bool orth = true;
            std::vector<double> sum(env.props[i].profile.size());
            for (std::size_t t = 0; t < sum.size(); ++t) {
                sum[t] = env.props[i].profile[t] + env.props[j].profile[t];
                if (sum[t] > 1 + eps_p) orth = false;
            }
            if (!orth) continue;
            int sid = env.find(sum);
            REQUIRE(sid >= 0);
            for (int r = 0; r < env.size(); ++r)
                if (env.leq_ids(i, r) && env.leq_ids(j, r)) REQUIRE(env.leq_ids(sid, r));
        }
}

TEST_CASE("atoms and covering on small Boolean algebras") {
    PropositionPoset ps = build_poset(binary_ensemble());
    auto rep = check_atomic_covering_separable(ps);
    REQUIRE(rep.atoms.size() == 2); // the two singleton-event propositions
    REQUIRE(rep.atomic());
    REQUIRE(rep.covering_ok());
    REQUIRE(rep.separable);

    // chain 0 < p < 1 with the complement present stays atomic
    PropositionPoset chain = build_poset(two_binary_ensemble());
    auto rep2 = check_atomic_covering_separable(chain);
    REQUIRE(rep2.atomic());
}
