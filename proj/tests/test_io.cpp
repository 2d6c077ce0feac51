#include "frtcd/error.hpp"
#include "frtcd/io.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

using namespace frtcd;

namespace {

experiment_file parse(const std::string& text) {
    std::istringstream in(text);
    return parse_experiment_csv(in, "test.csv");
}

}  // namespace

TEST_CASE("CSV parsing") {
    const auto f = parse("unit_id,w,y\n1,1,2.00\n2,0,1.5\n\n3,1,-0.25\r\n4,0,3e2\n");
    CHECK(f.data.n_units() == 4);
    CHECK(f.data.y_obs[3] == 300.0);
    CHECK(f.data.y_obs[2] == -0.25);
    CHECK(f.data.unit_ids[1] == "2");
    CHECK_FALSE(f.has_blocks);
    CHECK(f.inferred == design::completely_randomized(4, 2));
    const auto g = parse("Y, W ,unit_id\n1.0,1,\"a,b\"\n2.0,0,\"say \"\"hi\"\"\"\n");
    CHECK(g.data.unit_ids[0] == "a,b");
    CHECK(g.data.unit_ids[1] == "say \"hi\"");
}

TEST_CASE("CSV errors") {
    CHECK_THROWS_AS(parse(""), input_error);
    CHECK_THROWS_AS(parse("unit_id,w\n1,1\n"), input_error);
    CHECK_THROWS_AS(parse("unit_id,w,y,z\n1,1,1,1\n"), input_error);
    CHECK_THROWS_AS(parse("unit_id,w,y,w\n"), input_error);
    CHECK_THROWS_AS(parse("unit_id,w,y\n1,1,2\n2,2,1\n"), input_error);
    CHECK_THROWS_AS(parse("unit_id,w,y\n1,1,2\n2,0,abc\n"), input_error);
    CHECK_THROWS_AS(parse("unit_id,w,y\n1,1,2\n2,0,inf\n"), input_error);
    CHECK_THROWS_AS(parse("unit_id,w,y\n1,1,2\n2,0\n"), input_error);
    CHECK_THROWS_AS(parse("unit_id,w,y\n1,1,2\n"), input_error);
    CHECK_THROWS_AS(parse("unit_id,w,y\n1,1,2\n2,1,3\n"), input_error);
    try {
        parse("unit_id,w,y\n1,1,2\n2,0,x\n");
    } catch (const input_error& e) {
        CHECK(std::string(e.what()).find("test.csv:3") != std::string::npos);
    }
}

TEST_CASE("blocks are regrouped in order of first appearance") {
    const auto f = parse("unit_id,w,y,block\na,1,1,B\nb,0,2,A\nc,0,3,B\nd,1,4,A\ne,1,5,B\nf,0,6,B\n");
    CHECK(f.has_blocks);
    CHECK(f.block_names == std::vector<std::string>{"B", "A"});
    CHECK(f.data.unit_ids == std::vector<std::string>{"a", "c", "e", "f", "b", "d"});
    CHECK(f.data.y_obs == std::vector<double>{1, 3, 5, 6, 2, 4});
    CHECK(f.inferred == design::randomized_block({{4, 2}, {2, 1}}));
    CHECK(f.block_of_unit[4] == "A");
}

TEST_CASE("round trip through CSV") {
    const auto f = parse("unit_id,w,y,block\nu1,1,0.1234567890123,x\nu2,0,-2,x\nu3,0,5.5,y\nu4,1,1e-7,y\n");
    std::ostringstream out;
    write_experiment_csv(out, f);
    const auto g = parse(out.str());
    CHECK(g.data.y_obs == f.data.y_obs);
    CHECK(g.data.w_obs == f.data.w_obs);
    CHECK(g.data.unit_ids == f.data.unit_ids);
    CHECK(g.block_of_unit == f.block_of_unit);
    CHECK(g.inferred == f.inferred);
}

TEST_CASE("design strings") {
    CHECK(parse_design("CRD(10,5)") == design::completely_randomized(10, 5));
    CHECK(parse_design(" crd( 10 , 5 ) ") == design::completely_randomized(10, 5));
    CHECK(parse_design("RBD[(4,2),(6,3)]") == design::randomized_block({{4, 2}, {6, 3}}));
    CHECK(parse_design("blocks(2,8)") == design::balanced_blocks(2, 8));
    CHECK(parse_design(parse_design("RBD[(4,2),(6,3)]").describe()) == parse_design("rbd[(4,2),(6,3)]"));
    for (const char* bad : {"CRD(10)", "RBD[]", "CRD(4,4)", "latin(3)", "blocks(2,5)", "CRD(99999999999999999999999,1)"})
        CHECK_THROWS_AS(parse_design(bad), input_error);
}

TEST_CASE("declared designs are checked against the file") {
    const auto crd = parse("unit_id,w,y\n1,1,1\n2,0,2\n3,0,3\n4,1,4\n");
    CHECK(resolve_design(crd, std::nullopt) == design::completely_randomized(4, 2));
    CHECK(resolve_design(crd, std::string("CRD(4,2)")) == design::completely_randomized(4, 2));
    CHECK_THROWS_AS(resolve_design(crd, std::string("CRD(4,1)")), input_error);
    CHECK_THROWS_AS(resolve_design(crd, std::string("RBD[(2,1),(2,1)]")), input_error);
    const auto blk = parse("unit_id,w,y,block\n1,1,1,a\n2,0,2,a\n3,0,3,b\n4,1,4,b\n");
    CHECK(resolve_design(blk, std::string("blocks(2,2)")) == design::randomized_block({{2, 1}, {2, 1}}));
    CHECK_THROWS_AS(resolve_design(blk, std::string("CRD(4,2)")), input_error);
}

TEST_CASE("numbers in text and JSON") {
    constexpr double inf = std::numeric_limits<double>::infinity();
    CHECK(format_number(inf) == "inf");
    CHECK(format_number(-inf) == "-inf");
    CHECK(format_number(0.912) == "0.912");
    CHECK(format_number(1.0 / 3) == "0.333333333333");
    CHECK(json_number(-inf) == "-inf");
    CHECK(json_number(-0.0).dump() == "0.0");
    CHECK(number_from_json(json_number(inf)) == inf);
    CHECK(number_from_json(nlohmann::json(2.5)) == 2.5);
    CHECK_THROWS_AS(number_from_json(nlohmann::json("abc")), input_error);
}

TEST_CASE("interval and step function JSON") {
    confidence_interval ci{-std::numeric_limits<double>::infinity(), 2.5, 0.025, 0.025, interval_method::proposed};
    const auto j = to_json(ci);
    CHECK(j["lower"] == "-inf");
    CHECK(j["upper"] == 2.5);
    CHECK(j["method"] == "proposed");
    const pvalue_step_function f(curve_side::l_plus, {0.0, 1.0}, 1, 3, true);
    const auto k = to_json(f);
    CHECK(k["side"] == "Lplus");
    CHECK(k["values"].size() == 3);
    CHECK(k["breakpoints"][1] == 1.0);
}

TEST_CASE("scenario JSON") {
    const auto c = scenario_from_json(nlohmann::json::parse(
        R"j({"name":"s","b1":2,"k1":8,"design2":"CRD(16,8)","reps":7,"combiners":["de"],"true_theta":0.5})j"));
    CHECK(c.design1 == design::balanced_blocks(2, 8));
    CHECK(c.design2 == design::completely_randomized(16, 8));
    CHECK(c.reps == 7);
    CHECK(c.true_theta == 0.5);
    CHECK(c.k_cap == 5000);
    const auto again = scenario_from_json(to_json(c));
    CHECK(again.design1 == c.design1);
    CHECK(again.combiners == c.combiners);
    CHECK(again.master_seed == c.master_seed);
    CHECK_THROWS_AS(scenario_from_json(nlohmann::json::parse(R"j({"design1":"CRD(4,2)","design2":"CRD(4,2)","rep":3})j")),
                    input_error);
    CHECK_THROWS_AS(scenario_from_json(nlohmann::json::parse(R"j({"design1":"CRD(4,2)"})j")), input_error);
    CHECK_THROWS_AS(scenario_from_json(nlohmann::json::parse(R"j({"design1":"CRD(4,2)","design2":"CRD(4,2)","reps":"x"})j")),
                    input_error);
    CHECK_THROWS_AS(read_scenario("/nonexistent/scenario.json"), input_error);
}
