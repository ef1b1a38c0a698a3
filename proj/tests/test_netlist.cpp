#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pdnsim/netlist.hpp"

using namespace pdnsim;

TEST_CASE("value suffixes") {
    CHECK(parse_value("1k") == 1000.0);
    CHECK(parse_value("1K") == 1000.0);
    CHECK(parse_value("1meg") == 1e6);
    CHECK(parse_value("2MEG") == 2e6);
    CHECK(parse_value("1m") == doctest::Approx(1e-3));
    CHECK(parse_value("10p") == doctest::Approx(1e-11));
    CHECK(parse_value("10ps") == doctest::Approx(1e-11));
    CHECK(parse_value("3n") == doctest::Approx(3e-9));
    CHECK(parse_value("5u") == doctest::Approx(5e-6));
    CHECK(parse_value("2f") == doctest::Approx(2e-15));
    CHECK(parse_value("4g") == doctest::Approx(4e9));
    CHECK(parse_value("10s") == 10.0);
    CHECK(parse_value("1megohm") == 1e6);
    CHECK(parse_value("-2.5e-3") == doctest::Approx(-2.5e-3));
    CHECK_THROWS_AS(parse_value("5x"), UnknownSuffix);
    CHECK_THROWS_AS(parse_value("abc"), UnknownSuffix);
}

TEST_CASE("basic resistor line") {
    const Circuit c = parse_netlist("title\nR1 a 0 1k\n.end\n");
    REQUIRE(c.elements.size() == 1);
    const Element& e = c.elements[0];
    CHECK(e.kind == ElementKind::Resistor);
    CHECK(e.value == 1000.0);
    CHECK(e.node_pos == "a");
    CHECK(c.node_index("a") == 0);
    CHECK(c.node_index("0") == -1);
    CHECK(c.node_index("gnd") == -1);
}

TEST_CASE("pulse current source fields") {
    const Circuit c =
        parse_netlist("t\nI1 n1 0 PULSE(0 0.1 0 1n 1n 3n 10n)\n.end\n");
    REQUIRE(c.elements.size() == 1);
    const Element& e = c.elements[0];
    CHECK(e.kind == ElementKind::CurrentSource);
    REQUIRE(e.waveform.has_value());
    const PulseSpec& p = e.waveform->pulse_spec();
    CHECK(p.v1 == 0.0);
    CHECK(p.v2 == doctest::Approx(0.1));
    CHECK(p.td == 0.0);
    CHECK(p.tr == doctest::Approx(1e-9));
    CHECK(p.tf == doctest::Approx(1e-9));
    CHECK(p.pw == doctest::Approx(3e-9));
    CHECK(p.per == doctest::Approx(1e-8));
}

TEST_CASE("tran directive and end") {
    const Circuit c = parse_netlist("t\nR1 a 0 1\n.tran 10p 10n\n.end\nR2 zz 0 1\n");
    CHECK(c.elements.size() == 1); // content after .end ignored
    auto tran = c.tran();
    REQUIRE(tran.has_value());
    CHECK(tran->step_hint == doctest::Approx(1e-11));
    CHECK(tran->t_stop == doctest::Approx(1e-8));
}

TEST_CASE("node indices follow first appearance") {
    const Circuit c = parse_netlist("t\nR1 x y 1\nR2 y z 1\nR3 z 0 1\n.end\n");
    CHECK(c.node_index("x") == 0);
    CHECK(c.node_index("y") == 1);
    CHECK(c.node_index("z") == 2);
}

TEST_CASE("errors: duplicates, syntax, unknown directive") {
    CHECK_THROWS_AS(parse_netlist("t\nR1 a 0 1\nR1 b 0 2\n.end\n"), DuplicateElement);
    CHECK_THROWS_AS(parse_netlist("t\nQ1 a 0 1\n.end\n"), SyntaxError);
    CHECK_THROWS_AS(parse_netlist("t\nR1 a 0\n.end\n"), SyntaxError);
    CHECK_THROWS_AS(parse_netlist("t\n.op\n.end\n"), SyntaxError);
    CHECK_THROWS_AS(parse_netlist("t\nR1 a 0 1 extra\n.end\n"), SyntaxError);
    CHECK_THROWS_AS(parse_netlist("t\nR1 a 0 PULSE(0 1 0 1n 1n 1n 0)\n.end\n"),
                    SyntaxError);
    CHECK_THROWS_AS(parse_netlist("t\nI1 a 0 PULSE(0 1 0 2n 2n 2n 3n)\n.end\n"),
                    SyntaxError); // period shorter than tr+pw+tf
    CHECK_THROWS_AS(parse_netlist("t\nI1 a 0 PWL(1n 1 0 0)\n.end\n"), SyntaxError);
    CHECK_THROWS_AS(parse_netlist(""), SyntaxError);
}

TEST_CASE("case insensitivity and dc keyword") {
    const Circuit c = parse_netlist("T\nV1 VDD 0 DC 1.8\nr1 vdd 0 1K\n.END\n");
    CHECK(c.elements.size() == 2);
    CHECK(c.elements[0].kind == ElementKind::VoltageSource);
    CHECK(c.elements[0].value == doctest::Approx(1.8));
    CHECK(c.node_index("vdd") == 0);
}

TEST_CASE("comments and blank lines and crlf") {
    const Circuit c =
        parse_netlist("t\r\n* a comment\r\n\r\nR1 a 0 1\r\n.end\r\n");
    CHECK(c.elements.size() == 1);
}

TEST_CASE("round trip preserves elements and values exactly") {
    const std::string src =
        "bench\n"
        "R1 a b 123.456\n"
        "C1 b 0 1.5e-13\n"
        "L1 b c 2e-9\n"
        "V1 c 0 1.8\n"
        "I1 0 a PULSE(0 0.003 1e-09 1e-10 1e-10 3e-09 1e-08)\n"
        "I2 0 b PWL(0 0 1e-09 0.001 4e-09 0.001 5e-09 0)\n"
        ".tran 1e-11 1e-08\n"
        ".end\n";
    const Circuit a = parse_netlist(src);
    const Circuit b = parse_netlist(unparse(a));
    REQUIRE(a.elements.size() == b.elements.size());
    for (std::size_t i = 0; i < a.elements.size(); ++i) {
        const Element& x = a.elements[i];
        const Element& y = b.elements[i];
        CHECK(x.kind == y.kind);
        CHECK(x.name == y.name);
        CHECK(x.node_pos == y.node_pos);
        CHECK(x.node_neg == y.node_neg);
        CHECK(x.value == y.value);
        CHECK(x.waveform.has_value() == y.waveform.has_value());
        if (x.waveform && x.waveform->kind() == Waveform::Kind::Pulse) {
            const auto& px = x.waveform->pulse_spec();
            const auto& py = y.waveform->pulse_spec();
            CHECK(px.v1 == py.v1);
            CHECK(px.v2 == py.v2);
            CHECK(px.td == py.td);
            CHECK(px.tr == py.tr);
            CHECK(px.tf == py.tf);
            CHECK(px.pw == py.pw);
            CHECK(px.per == py.per);
        }
        if (x.waveform && x.waveform->kind() == Waveform::Kind::Pwl)
            CHECK(x.waveform->pwl_points() == y.waveform->pwl_points());
    }
    CHECK(a.node_names() == b.node_names());
}

TEST_CASE("validate flags zero values, conflicts and floating nodes") {
    SUBCASE("zero-valued resistor") {
        const Circuit c = parse_netlist("t\nR1 a b 0\nR2 a 0 1\nR3 b 0 1\n.end\n");
        const auto diags = validate(c);
        REQUIRE(diags.size() == 1);
        CHECK(diags[0].code == Diagnostic::Code::ZeroValue);
        CHECK(diags[0].subject == "r1");
    }
    SUBCASE("parallel voltage sources conflict") {
        const Circuit c = parse_netlist("t\nV1 a 0 1\nV2 a 0 2\nR1 a 0 1\n.end\n");
        const auto diags = validate(c);
        REQUIRE(diags.size() == 1);
        CHECK(diags[0].code == Diagnostic::Code::VSourceConflict);
    }
    SUBCASE("floating node") {
        const Circuit c = parse_netlist("t\nR1 a 0 1\nC1 b a 1p\nI1 0 b 1m\n.end\n");
        const auto diags = validate(c);
        REQUIRE(diags.size() == 1);
        CHECK(diags[0].code == Diagnostic::Code::FloatingNode);
        CHECK(diags[0].subject == "b");
    }
    SUBCASE("valid rc circuit is clean") {
        const Circuit c = parse_netlist("t\nR1 a 0 1\nC1 a 0 1p\nI1 0 a 1m\n.end\n");
        CHECK(validate(c).empty());
    }
}
