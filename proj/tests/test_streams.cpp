#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <thread>

#include "helpers.hpp"
#include "polymatch/streams.hpp"

using namespace polymatch;

TEST_CASE("gen_er degenerate parameters") {
    CHECK(gen_er(2, 1.0, 7).size() == 1);
    CHECK(gen_er(5, 0.0, 7).empty());
    CHECK_THROWS_AS(gen_er(1, 0.5, 7), std::invalid_argument);
    CHECK_THROWS_AS(gen_er(5, 1.5, 7), std::invalid_argument);
}

TEST_CASE("gen_er count concentrates and weights stay in range") {
    const auto edges = gen_er(100, 0.1, 3);
    // Binomial(4950, 0.1): mean 495, +-5 sigma stays within [300, 700]
    CHECK(edges.size() >= 300);
    CHECK(edges.size() <= 700);
    for (const auto& e : edges) {
        CHECK(e.u < e.v);
        CHECK(e.v < 100);
        CHECK(e.w >= 1.0);
        CHECK(e.w <= 100.0 * 100.0);
    }
}

TEST_CASE("generators are deterministic in the seed") {
    CHECK(gen_er(50, 0.2, 11) == gen_er(50, 0.2, 11));
    CHECK(gen_er(50, 0.2, 11) != gen_er(50, 0.2, 12));
    const auto sg = default_seed_graph(5);
    CHECK(gen_ba(300, 3, sg, 9) == gen_ba(300, 3, sg, 9));
    CHECK(gen_ua(300, 3, sg, 9) == gen_ua(300, 3, sg, 9));
}

TEST_CASE("attachment generators grow by exactly x edges per vertex") {
    const auto sg = default_seed_graph(1);
    const auto one_step = gen_ba(sg.n + 1, 3, sg, 4);
    CHECK(one_step.size() == sg.edges.size() + 3);
    const std::uint64_t n = sg.n + 40;
    CHECK(gen_ba(n, 5, sg, 4).size() == sg.edges.size() + (n - sg.n) * 5);
    CHECK(gen_ua(n, 5, sg, 4).size() == sg.edges.size() + (n - sg.n) * 5);
}

TEST_CASE("uniform attachment only picks older vertices") {
    const auto sg = default_seed_graph(2);
    const auto edges = gen_ua(sg.n + 50, 4, sg, 8);
    for (std::size_t i = sg.edges.size(); i < edges.size(); ++i)
        CHECK(edges[i].v < edges[i].u);
}

namespace {
std::uint64_t max_degree(const std::vector<WeightedEdge>& edges, std::uint64_t n) {
    std::vector<std::uint64_t> deg(n, 0);
    std::uint64_t best = 0;
    for (const auto& e : edges) {
        best = std::max(best, ++deg[e.u]);
        best = std::max(best, ++deg[e.v]);
    }
    return best;
}
} // namespace

TEST_CASE("preferential attachment has heavier-tailed degrees than uniform") {
    const std::uint64_t n = 10000, x = 4;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto sg = default_seed_graph(seed);
        const auto ba = gen_ba(n, x, sg, seed);
        const auto ua = gen_ua(n, x, sg, seed);
        CHECK(max_degree(ba, n) > max_degree(ua, n));
    }
}

TEST_CASE("partition shapes") {
    std::vector<WeightedEdge> six(6), seven(7);
    for (std::size_t i = 0; i < 7; ++i) {
        const WeightedEdge e{i, i + 10, 1.0};
        if (i < 6) six[i] = e;
        seven[i] = e;
    }
    const auto p6 = partition(six, 3, PartitionMode::RoundRobin);
    CHECK(p6[0].size() == 2);
    CHECK(p6[1].size() == 2);
    CHECK(p6[2].size() == 2);
    const auto p7 = partition(seven, 3, PartitionMode::RoundRobin);
    CHECK(p7[0].size() == 3);
    CHECK(p7[1].size() == 2);
    CHECK(p7[2].size() == 2);
    const auto p1 = partition(seven, 1, PartitionMode::RoundRobin);
    CHECK(p1[0] == seven);
}

TEST_CASE("partition conserves the edge multiset in every mode") {
    const auto edges = gen_er(60, 0.3, 21);
    for (auto mode :
         {PartitionMode::RoundRobin, PartitionMode::Contiguous, PartitionMode::Shuffled}) {
        for (unsigned k : {1u, 2u, 5u, 7u}) {
            const auto parts = partition(edges, k, mode, 33);
            std::vector<WeightedEdge> merged;
            for (const auto& p : parts) merged.insert(merged.end(), p.begin(), p.end());
            CHECK(testutil::same_edge_set(edges, merged));
        }
    }
}

TEST_CASE("stream file roundtrips") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path();

    const auto p0 = (dir / "psmwm_empty.bin").string();
    write_stream(p0, 9, {});
    auto g0 = read_stream(p0);
    CHECK(g0.n == 9);
    CHECK(g0.edges.empty());

    const auto p1 = (dir / "psmwm_one.bin").string();
    write_stream(p1, 2, std::vector<WeightedEdge>{{0, 1, 5.0}});
    auto g1 = read_stream(p1);
    REQUIRE(g1.edges.size() == 1);
    CHECK(g1.edges[0] == WeightedEdge{0, 1, 5.0});

    // large roundtrip: rewriting what was read must be byte-identical
    SplitMix64 rng(77);
    std::vector<WeightedEdge> big(1000000);
    for (auto& e : big) e = {rng.next(), rng.next(), rng.uniform(0.001, 1e9)};
    const auto pa = (dir / "psmwm_big_a.bin").string();
    const auto pb = (dir / "psmwm_big_b.bin").string();
    write_stream(pa, 1u << 20, big);
    const auto back = read_stream(pa);
    write_stream(pb, back.n, back.edges);
    std::ifstream fa(pa, std::ios::binary), fb(pb, std::ios::binary);
    std::vector<char> ba((std::istreambuf_iterator<char>(fa)), {});
    std::vector<char> bb((std::istreambuf_iterator<char>(fb)), {});
    CHECK(ba == bb);
    std::remove(p0.c_str());
    std::remove(p1.c_str());
    std::remove(pa.c_str());
    std::remove(pb.c_str());
}

TEST_CASE("stream file errors") {
    namespace fs = std::filesystem;
    CHECK_THROWS_AS(read_stream("/nonexistent/psmwm.bin"), std::runtime_error);
    const auto bad = (fs::temp_directory_path() / "psmwm_bad.bin").string();
    {
        std::ofstream f(bad, std::ios::binary);
        f << "garbage";
    }
    CHECK_THROWS_AS(read_stream(bad), std::runtime_error);
    // valid header, truncated record
    write_stream(bad, 3, std::vector<WeightedEdge>{{0, 1, 2.0}, {1, 2, 3.0}});
    fs::resize_file(bad, fs::file_size(bad) - 5);
    CHECK_THROWS_AS(read_stream(bad), std::runtime_error);
    std::remove(bad.c_str());
}

TEST_CASE("bounded buffer delivers every edge in order") {
    BoundedBufferStream buf(16);
    const auto edges = gen_er(40, 0.3, 5);
    std::thread producer([&] {
        for (const auto& e : edges) buf.push(e);
        buf.close();
    });
    std::vector<WeightedEdge> got;
    WeightedEdge e;
    while (buf.next(e)) got.push_back(e);
    producer.join();
    CHECK(got == edges);
}
