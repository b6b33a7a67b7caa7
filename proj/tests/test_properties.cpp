#include <doctest.h>

#include "hookstep/generator.hpp"
#include "hookstep/oracle.hpp"

using namespace hookstep;

namespace {

// Applies the first `k` updaters of every queue, keeping the decisions the
// engine would have: this is what a partial normalization looks like.
View partially_normalize(const View& v, std::size_t k) {
    View out = v;
    bool pending = false;
    for (auto& [label, entry] : out.store) {
        StateEntry head{entry.value, {}};
        std::size_t n = std::min(k, entry.queue.size());
        head.queue.assign(entry.queue.begin(), entry.queue.begin() + static_cast<std::ptrdiff_t>(n));
        NormalizedEntry folded = normalize_entry(head);
        if (folded.prefix < n) continue;  // stop at impure or failing updaters
        entry.value = folded.val;
        entry.queue.erase(entry.queue.begin(), entry.queue.begin() + static_cast<std::ptrdiff_t>(n));
        if (!value_equiv(head.value, folded.val)) out.dec.effect = true;
        pending = pending || !entry.queue.empty();
    }
    if (!pending && !v.dec.check) out.dec.check = false;
    return out;
}

}  // namespace

TEST_CASE("generated programs satisfy every oracle") {
    std::size_t similar_checked = 0;
    for (const auto& g : generate_corpus(20240601, 600)) {
        InvariantReport r = run_invariant_suites(g.source, g.events, Budgets{25, 30});
        CAPTURE(g.source);
        for (const auto& s : r.suites) {
            CAPTURE(s.name);
            CHECK(s.ok());
        }
        similar_checked += !r.find("similar transitions")->skipped;
    }
    CHECK(similar_checked > 300);
}

TEST_CASE("similar transitions on programs with only pure updaters") {
    GeneratorOptions opts;
    opts.pure_only = true;
    for (const auto& g : generate_corpus(77, 300, opts)) {
        CAPTURE(g.source);
        CHECK(check_similar_transition(g.source, g.events, Budgets{25, 30}));
    }
}

TEST_CASE("normalization is idempotent and similarity is an equivalence") {
    ViewCorpus corpus = generate_views(99, 1000);
    std::vector<View> pool;
    std::size_t fixed_points = 0;
    for (const auto& [p, v] : corpus.views) {
        View n = normalize_view(v);
        View nn = normalize_view(n);
        // Values, queues and Effect settle after one round; Check only when
        // nothing was left to do.
        CHECK(same_shape(nn, n, ShapeOptions{true, false}));
        CHECK(nn.dec.effect == n.dec.effect);
        if (!n.dec.check) {
            ++fixed_points;
            CHECK(views_equal(nn, n));
            CHECK(views_similar(v, n));
        }
        CHECK(views_similar(v, v));
        pool.push_back(v);
        if (pool.size() < 300) {
            pool.push_back(n);
            for (std::size_t k = 1; k <= 2; ++k) pool.push_back(partially_normalize(v, k));
        }
    }
    CHECK(fixed_points > 100);

    std::size_t similar_pairs = 0;
    const std::size_t n = std::min<std::size_t>(pool.size(), 400);
    std::vector<std::vector<bool>> sim(n, std::vector<bool>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) sim[i][j] = views_similar(pool[i], pool[j]);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(sim[i][i]);
        for (std::size_t j = 0; j < n; ++j) {
            CHECK(sim[i][j] == sim[j][i]);
            if (!sim[i][j]) continue;
            if (i != j) ++similar_pairs;
            for (std::size_t k = 0; k < n; ++k) {
                if (sim[j][k] && !sim[i][k]) FAIL_CHECK("similarity is not transitive at " << i << ", " << j << ", " << k);
            }
        }
    }
    CHECK(similar_pairs > 50);
}

TEST_CASE("value equivalence is an equivalence") {
    Closure f{"x", nullptr, nullptr, 1};
    Closure g{"x", nullptr, nullptr, 2};
    std::vector<Value> values = {
        Value::unit(), Value::boolean(true), Value::boolean(false), Value::integer(0), Value::integer(1),
        Value::string("a"), Value::string(""), Value{f}, Value{g}, Value{Setter{Label{0}, Path{0}}},
        Value{Setter{Label{0}, Path{1}}}, Value{ComponentRef{"C"}},
        Value{ComSpec{"C", std::make_shared<const Value>(Value::integer(1))}},
        Value{ComSpec{"C", std::make_shared<const Value>(Value::integer(1))}},
        Value{SpecArray{{Value::integer(1), Value{f}}}}, Value{SpecArray{{Value::integer(1), Value{f}}}},
        Value{SpecArray{{Value::integer(1), Value{g}}}},
    };
    for (const auto& a : values) {
        CHECK(value_equiv(a, a));
        for (const auto& b : values) {
            CHECK(value_equiv(a, b) == value_equiv(b, a));
            if (!value_equiv(a, b)) continue;
            for (const auto& c : values) {
                if (value_equiv(b, c)) CHECK(value_equiv(a, c));
            }
        }
    }
}

TEST_CASE("runs are deterministic and traces replay") {
    for (const auto& g : generate_corpus(5, 150)) {
        CAPTURE(g.source);
        TraceFile a = record_run(g.source, g.events, Budgets{25, 30});
        std::string bytes = serialize(a);
        CHECK(serialize(record_run(g.source, g.events, Budgets{25, 30})) == bytes);
        TraceFile back = deserialize(bytes);
        CHECK(back == a);
        CHECK(serialize(record_run(back.program, back.events, back.budgets)) == bytes);
    }
}
