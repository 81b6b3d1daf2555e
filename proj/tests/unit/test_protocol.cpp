// SPDX-License-Identifier: Apache-2.0
//
// hmsrelay - reconfigurable Huygens metasurface relay simulator
// Copyright (C) 2026 The hmsrelay authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "hms/config.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace hms;
using Catch::Approx;

namespace
{
    const Config &cfg()
    {
        static const Config c = default_config();
        return c;
    }

    const PhaseLookupTable &lut(Mode m)
    {
        static const PhaseLookupTable lens = build_config_lut(cfg(), Mode::Lens);
        static const PhaseLookupTable mirror = build_config_lut(cfg(), Mode::Mirror);
        return m == Mode::Lens ? lens : mirror;
    }

    ProtocolChannel channel(const ChannelParams &p) { return ProtocolChannel(p, lut(Mode::Lens), lut(Mode::Mirror)); }

    ProtocolOptions options() { return protocol_options(cfg()); }
}

TEST_CASE("codebooks", "[protocol]")
{
    const auto cb = make_codebook(8, 60.0);
    REQUIRE(cb.size() == 8);
    CHECK(cb.front() == -60.0);
    CHECK(cb.back() == Approx(60.0));
    CHECK(make_codebook(1, 60.0) == std::vector<double>{0.0});
    CHECK(codebook_step(25, 60.0) == Approx(5.0));
}

TEST_CASE("cold start probes every combination", "[protocol]")
{
    const auto cb = make_codebook(8, 60.0);
    ChannelParams p = channel_params(cfg());
    p.truth_enodeb_deg = cb[5];
    p.truth_surface_deg = cb[2];
    p.truth_ue_deg = cb[4];
    const ProtocolChannel ch = channel(p);
    BeamSession s(ch, options());
    const AlignmentResult r = s.cold_start(8, 8, 8);
    CHECK(r.probes_used == 512);
    CHECK(s.probes().size() == 512);
    CHECK(r.success);
    CHECK(r.enodeb_deg == cb[5]);
    CHECK(r.surface_deg == cb[2]);
    CHECK(r.ue_deg == cb[4]);
}

TEST_CASE("mid-bin truth with a 5 degree codebook", "[protocol]")
{
    ChannelParams p = channel_params(cfg());
    p.truth_enodeb_deg = 12.5;
    p.truth_surface_deg = -22.5;
    p.truth_ue_deg = 37.5;
    const ProtocolChannel ch = channel(p);
    BeamSession s(ch, options());
    const AlignmentResult coarse = s.cold_start(25, 25, 25);
    CHECK(coarse.success);
    CHECK(std::abs(coarse.enodeb_deg - p.truth_enodeb_deg) <= 2.5);
    CHECK(std::abs(coarse.surface_deg - p.truth_surface_deg) <= 2.5);
    CHECK(std::abs(coarse.ue_deg - p.truth_ue_deg) <= 2.5);
    const AlignmentResult fine = s.refine(coarse, 2);
    CHECK(fine.success);
    CHECK(std::abs(fine.surface_deg - p.truth_surface_deg) <= 3.0);
}

TEST_CASE("steady state sweeps only the surface and UE", "[protocol]")
{
    const ProtocolChannel ch = channel(channel_params(cfg()));
    BeamSession s(ch, options());
    const AlignmentResult cold = s.cold_start(16, 16, 16);
    const AlignmentResult steady = s.steady_state(cold.enodeb_deg, 16, 16);
    CHECK(steady.probes_used == 256);
    CHECK(steady.surface_deg == cold.surface_deg);
    CHECK(steady.ue_deg == cold.ue_deg);
}

TEST_CASE("search without a usable path reports failure", "[protocol]")
{
    ChannelParams p = channel_params(cfg());
    p.surface_enabled = false;
    p.direct_distance = 8.0;
    p.direct_loss_db = 90.0;
    const ProtocolChannel ch = channel(p);
    BeamSession s(ch, options());
    const AlignmentResult r = s.steady_state(0.0, 8, 8);
    CHECK(r.probes_used == 64);
    CHECK_FALSE(r.detected);
    CHECK_FALSE(r.success);
}

TEST_CASE("refinement cost and accuracy", "[protocol]")
{
    const ProtocolChannel ch = channel(channel_params(cfg()));
    BeamSession s(ch, options());
    const AlignmentResult coarse = s.cold_start(8, 8, 8);
    const AlignmentResult fine = s.refine(coarse, 2);
    CHECK(fine.probes_used - coarse.probes_used == 30);
    CHECK(fine.success);
    CHECK(std::abs(fine.enodeb_deg - ch.params().truth_enodeb_deg) <= 3.0);
    CHECK(std::abs(fine.surface_deg - ch.params().truth_surface_deg) <= 3.0);
    CHECK(std::abs(fine.ue_deg - ch.params().truth_ue_deg) <= 3.0);
}

TEST_CASE("refining an exact alignment changes nothing", "[protocol]")
{
    ChannelParams p = channel_params(cfg());
    p.ideal_surface = true;
    const ProtocolChannel ch = channel(p);
    BeamSession s(ch, options());
    AlignmentResult exact;
    exact.procedure = "given";
    exact.enodeb_deg = p.truth_enodeb_deg;
    exact.surface_deg = p.truth_surface_deg;
    exact.ue_deg = p.truth_ue_deg;
    exact.enodeb_step_deg = exact.surface_step_deg = exact.ue_step_deg = codebook_step(8, 60.0);
    exact.detected = true;
    const AlignmentResult r = s.refine(exact, 3);
    CHECK(r.enodeb_deg == exact.enodeb_deg);
    CHECK(r.surface_deg == exact.surface_deg);
    CHECK(r.ue_deg == exact.ue_deg);
}

TEST_CASE("uplink reuses the downlink alignment", "[protocol]")
{
    for (int a = -45; a <= 45; a += 15)
    {
        ChannelParams p = channel_params(cfg());
        p.truth_surface_deg = a;
        const ProtocolChannel ch = channel(p);
        BeamSession s(ch, options());
        const AlignmentResult down = s.refine(s.cold_start(8, 8, 8), 2);
        const std::size_t before = s.probes().size();
        const AlignmentResult up = s.uplink_from_downlink(down);
        CHECK(up.probes_used == 0);
        CHECK(s.probes().size() == before);
        CHECK(up.snr_db == down.snr_db);
        CHECK(up.surface_deg == down.surface_deg);
    }
}

TEST_CASE("multi-arm search uses a logarithmic number of probes", "[protocol]")
{
    const ProtocolChannel ch = channel(channel_params(cfg()));
    BeamSession s(ch, options());
    const AlignmentResult r = s.multiarm(64, ch.params().truth_enodeb_deg, ch.params().truth_ue_deg, 0);
    CHECK(r.probes_used <= 12);
    CHECK_FALSE(r.fallback);
    CHECK(std::abs(r.surface_deg - ch.params().truth_surface_deg) <= codebook_step(64, 60.0));
}

TEST_CASE("multi-arm search succeeds over random truths", "[protocol][property]")
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 50; ++t)
    {
        ChannelParams p = channel_params(cfg());
        p.geometry_mode = t % 2 ? Mode::Mirror : Mode::Lens;
        p.truth_incident_deg = 40.0 * u(rng);
        p.truth_surface_deg = 55.0 * u(rng);
        const ProtocolChannel ch = channel(p);
        BeamSession s(ch, options(), std::uint64_t(t));
        const AlignmentResult r = s.multiarm(64, p.truth_enodeb_deg, p.truth_ue_deg, 2);
        CHECK(r.success);
        CHECK(r.probes_used <= 12 + 10);
        if (!r.fallback)
            CHECK(r.snr_db >= r.oracle_snr_db - 1.0);
    }
}

TEST_CASE("wider arm separation weakens each arm", "[protocol]")
{
    // Splits centred on broadside; each arm is measured with the receiver on that arm.
    auto arm_snr = [](double half_sep, double at) {
        ChannelParams p = channel_params(cfg());
        p.truth_surface_deg = at;
        const ProtocolChannel ch = channel(p);
        return ch.snr_db({p.truth_enodeb_deg, 0.0}, SurfaceBeam{{{-half_sep, 0.0}, {half_sep, 0.0}}},
                         p.geometry_mode, {p.truth_ue_deg, 0.0});
    };
    for (double side : {-1.0, 1.0})
        CHECK(arm_snr(60.0, 60.0 * side) < arm_snr(7.5, 7.5 * side));
}

TEST_CASE("wrong surface mode loses the relay path", "[protocol]")
{
    ChannelParams p = channel_params(cfg());
    p.geometry_mode = Mode::Lens;
    const ProtocolChannel ch = channel(p);
    const BeamSpec e{p.truth_enodeb_deg, 0.0}, ue{p.truth_ue_deg, 0.0};
    const SurfaceBeam w{{{p.truth_surface_deg, 0.0}}};
    CHECK(ch.snr_db(e, w, Mode::Lens, ue) > ch.snr_db(e, w, Mode::Mirror, ue) + 20.0);
    CHECK(ch.snr_db(e, w, Mode::Lens, ue) == Approx(ch.oracle_snr_db()));
}

TEST_CASE("only the UE can switch the surface mode", "[protocol]")
{
    SurfaceNode node;
    ControlMessage m;
    m.from = NodeRole::ENodeB;
    m.to = NodeRole::Surface;
    m.kind = "set_mode";
    m.mode = Mode::Lens;
    CHECK_THROWS_AS(node.deliver(m), std::logic_error);
    CHECK(node.mode() == Mode::Mirror);
    m.from = NodeRole::UE;
    node.deliver(m);
    CHECK(node.mode() == Mode::Lens);

    const ProtocolChannel ch = channel(channel_params(cfg()));
    BeamSession s(ch, options());
    s.ue_set_mode(Mode::Mirror);
    s.cold_start(4, 4, 4);
    for (const ControlMessage &c : s.messages())
    {
        CHECK(c.from == NodeRole::UE);
        CHECK(c.to == NodeRole::Surface);
    }
}

TEST_CASE("seeded sessions replay identically", "[protocol][property]")
{
    const ProtocolChannel ch = channel(channel_params(cfg()));
    ProtocolOptions o = options();
    o.noise_sigma_db = 2.0;
    auto run = [&](std::uint64_t seed) {
        BeamSession s(ch, o, seed);
        s.refine(s.cold_start(6, 6, 6), 2);
        std::vector<double> snr;
        for (const ProbeRecord &r : s.probes())
            snr.push_back(r.snr_db);
        return std::make_pair(snr, s.messages().size());
    };
    CHECK(run(4) == run(4));
    CHECK(run(4).first != run(5).first);
}
