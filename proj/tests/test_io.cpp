#include <doctest.h>

#include <cstring>
#include <filesystem>

#include "degcausal/io.hpp"
#include "support.hpp"

using namespace degcausal;

TEST_SUITE("io") {

TEST_CASE("graph round trip") {
    CausalGraph g(3, {"a", "b", "c"});
    g.add_directed(0, 1);
    g.add_undirected(1, 2);
    const nlohmann::json j = graph_to_json(g);
    CHECK(j.at("labels") == nlohmann::json{"a", "b", "c"});
    const CausalGraph back = graph_from_json(j);
    CHECK(back == g);
    CHECK(back.labels() == g.labels());
    CHECK(kind_of([] { graph_from_json({{"labels", {"a"}}, {"adj", {{2}}}}); }) == ErrorKind::StructuralInput);
    CHECK(kind_of([] { graph_from_json(nlohmann::json{{"adj", 3}}); }) == ErrorKind::Parse);
}

TEST_CASE("system spec round trip and unknown keys") {
    SystemSpec s = coupled_pair_spec(0.345, 1.2);
    s.coupling = CouplingInput::Observed;
    s.params[0].gamma = 1.25;
    const SystemSpec back = system_spec_from_json(system_spec_to_json(s));
    CHECK(system_spec_to_json(back) == system_spec_to_json(s));
    CHECK(back.edges[0].alpha == 0.345);
    CHECK(back.coupling == CouplingInput::Observed);

    nlohmann::json j = system_spec_to_json(s);
    j["colour"] = "red";
    CHECK(kind_of([&] { system_spec_from_json(j); }) == ErrorKind::Config);
    nlohmann::json p = system_spec_to_json(s);
    p["params"][0]["drift"] = 1.0;
    CHECK(kind_of([&] { system_spec_from_json(p); }) == ErrorKind::Config);
}

TEST_CASE("dataset csv round trip is bit exact") {
    const DegradationDataset d = simulate_system(coupled_pair_spec(), 3, 12);
    const std::string text = dataset_to_csv(d);
    CHECK(text.rfind("unit,time,X1,X2\n", 0) == 0);
    const DegradationDataset back = dataset_from_csv(text);
    REQUIRE(back.n() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(std::memcmp(back.unit(i).values.data(), d.unit(i).values.data(), sizeof(double) * static_cast<std::size_t>(d.unit(i).values.size())) == 0);
        CHECK(back.unit(i).times == d.unit(i).times);
    }
    CHECK(dataset_to_csv(back) == text);
    CHECK(kind_of([] { dataset_from_csv("unit,time,X1\n1,0,abc\n"); }) == ErrorKind::Parse);
}

TEST_CASE("matrix csv round trip") {
    const DataMatrix m = build_s2(simulate_system(independent_pair_spec(), 2, 1));
    const DataMatrix back = matrix_from_csv(matrix_to_csv(m), matrix_metadata(m));
    CHECK(back.values == m.values);
    CHECK(back.labels == m.labels);
    CHECK(back.strategy == Strategy::IncrementStacking);
    CHECK(matrix_metadata(m).at("strategy") == "S2");
}

TEST_CASE("format_double") {
    for (double v : {0.1, -1e-300, 123456.789, 1.0 / 3.0}) CHECK(std::stod(format_double(v)) == v);
    CHECK(format_double(2.0) == "2");
}

TEST_CASE("text files") {
    const auto dir = std::filesystem::temp_directory_path() / "degcausal-io-test";
    std::filesystem::remove_all(dir);
    write_text_file(dir / "a" / "b.txt", "hello\n");
    CHECK(read_text_file(dir / "a" / "b.txt") == "hello\n");
    CHECK(kind_of([&] { read_text_file(dir / "missing.txt"); }) == ErrorKind::Io);
    std::filesystem::remove_all(dir);
}

}  // TEST_SUITE
