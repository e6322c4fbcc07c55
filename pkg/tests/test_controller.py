import random
from dataclasses import replace

import pytest

from pracsim.controller import (Controller, SimConfig, measure_sbdr_period,
                                run, run_detailed)
from pracsim.dram import AccessClass, check_command_log
from pracsim.mapping import AddressMapping
from pracsim.policy import policy_preset
from pracsim.stats import sbdr_oracle_cycles
from pracsim.timing import preset
from pracsim.trace import MemRequest, Trace, TraceError, gen_mixed, gen_sbdr

MAP = AddressMapping()
DEF = preset("default")
PRAC = preset("prac")


def reads(rows, bank=0, nonmem=0):
    return Trace([MemRequest(nonmem, "read", MAP.encode_flat(bank, r)) for r in rows])


def config(timing=DEF, policy="open", **kw):
    return SimConfig(timing=timing, policy=policy_preset(policy), **kw)


class TestLatencyFormulas:
    def test_read_hit_is_tcl(self):
        res = run_detailed(config(), reads([5, 5]), keep_completions=True)
        hit = res.completions[1]
        assert hit.access_class is AccessClass.HIT
        assert hit.latency_cycles == DEF.to_cycles().t_cl == 39

    def test_read_empty_is_trcd_tcl(self):
        res = run_detailed(config(), reads([5]), keep_completions=True)
        cyc = DEF.to_cycles()
        assert res.completions[0].access_class is AccessClass.EMPTY
        assert res.completions[0].latency_cycles == cyc.t_rcd + cyc.t_cl == 78

    def test_read_miss_is_trp_trcd_tcl(self):
        # a long gap keeps tRAS/tRC residue off the critical path
        trace = reads([5, 9], nonmem=1000)
        res = run_detailed(config(), trace, keep_completions=True)
        cyc = DEF.to_cycles()
        miss = res.completions[1]
        assert miss.access_class is AccessClass.MISS
        assert miss.latency_cycles == cyc.t_rp + cyc.t_rcd + cyc.t_cl == 117

    def test_prac_miss(self):
        trace = reads([5, 9], nonmem=1000)
        res = run_detailed(config(timing=PRAC), trace, keep_completions=True)
        cyc = PRAC.to_cycles()
        assert res.completions[1].latency_cycles == cyc.t_rp + cyc.t_rcd + cyc.t_cl == 165

    def test_three_read_example(self):
        res = run_detailed(config(), reads([5, 5, 9]), keep_completions=True)
        classes = [c.access_class for c in res.completions]
        assert classes == [AccessClass.EMPTY, AccessClass.HIT, AccessClass.MISS]
        assert [c.latency_cycles for c in res.completions] == [78, 39, 117]

    def test_decomposition_for_uncontended_reads(self):
        # spaced requests: every read latency is exactly one of the three sums
        rng = random.Random(0)
        rows = [rng.randrange(4) for _ in range(60)]
        trace = reads(rows, nonmem=2000)
        res = run_detailed(config(), trace, keep_completions=True)
        cyc = DEF.to_cycles()
        allowed = {cyc.t_cl, cyc.t_rcd + cyc.t_cl, cyc.t_rp + cyc.t_rcd + cyc.t_cl}
        for c in res.completions:
            assert c.latency_cycles in allowed


class TestPolicyBehavior:
    def test_close_makes_everything_empty(self):
        res = run_detailed(config(policy="close"), reads([5, 5, 9]),
                           keep_completions=True)
        assert all(c.access_class is AccessClass.EMPTY for c in res.completions)

    def test_close_premature_flag_on_destroyed_hit(self):
        res = run_detailed(config(policy="close"), reads([5, 5, 9]),
                           keep_completions=True)
        assert [c.premature for c in res.completions] == [False, True, False]

    def test_open_never_issues_idle_pre(self):
        res = run_detailed(config(policy="open"), reads([5, 5, 5]),
                           log_commands=True)
        assert not any("PRE" in line for line in res.command_log)

    def test_open_miss_conflict_pre_still_happens(self):
        res = run_detailed(config(policy="open"), reads([5, 9]), log_commands=True)
        assert sum("PRE" in line for line in res.command_log) == 1

    def test_advance_idle_returns_due_closes(self):
        ctrl = Controller(config(policy="close"))
        req = MemRequest(0, "read", MAP.encode_flat(0, 5))
        record = ctrl.service(req, 0)
        assert ctrl.pending_close  # close scheduled
        issued = ctrl.advance_idle(record.data_tick + 1000)
        assert len(issued) == 1
        tick, cmd = issued[0]
        # the idle close respects tRAS and the read tail
        cyc = DEF.to_cycles()
        assert tick == max(cyc.t_ras, cyc.t_rcd + cyc.t_rtp)
        assert ctrl.banks[0].open_row is None

    def test_adaptive_deadline_applies_after_current_idle(self):
        # idle=8 is below the read-to-precharge tail, so the close lands
        # at the same tick a close policy would use
        c_adaptive = Controller(config(policy="adaptive"))
        c_close = Controller(config(policy="close"))
        req = MemRequest(0, "read", MAP.encode_flat(0, 5))
        c_adaptive.service(req, 0)
        c_close.service(req, 0)
        assert c_adaptive.pending_close == c_close.pending_close

    def test_per_bank_scope_isolates_windows(self):
        per_bank = replace(policy_preset("adaptive"), per_bank=True)
        cfg = SimConfig(timing=DEF, policy=per_bank)
        trace = Trace([MemRequest(0, "read", MAP.encode_flat(b % 2, 1))
                       for b in range(10)])
        rep = run(cfg, trace)
        assert rep.accesses == 10


class TestWrites:
    def test_write_completion_is_issue_tick(self):
        trace = Trace([MemRequest(0, "write", MAP.encode_flat(0, 5))])
        res = run_detailed(config(), trace, keep_completions=True)
        c = res.completions[0]
        assert c.latency_cycles == DEF.to_cycles().t_rcd  # ACT then posted WR

    def test_write_hit_is_posted_zero_latency(self):
        trace = Trace([MemRequest(0, "read", MAP.encode_flat(0, 5)),
                       MemRequest(0, "write", MAP.encode_flat(0, 5))])
        res = run_detailed(config(), trace, keep_completions=True)
        assert res.completions[1].latency_cycles == 0

    def test_write_recovery_delays_following_conflict(self):
        cyc = DEF.to_cycles()
        trace = Trace([MemRequest(0, "write", MAP.encode_flat(0, 5)),
                       MemRequest(0, "read", MAP.encode_flat(0, 9))])
        res = run_detailed(config(), trace, keep_completions=True, log_commands=True)
        wr_tick = next(int(l.split()[0]) for l in res.command_log if " WR " in l)
        pre_tick = next(int(l.split()[0]) for l in res.command_log if " PRE" in l)
        assert pre_tick >= wr_tick + cyc.t_cwl + cyc.t_bl + cyc.t_wr
        assert check_command_log(res.command_log, cyc) == []


class TestAccounting:
    def test_counter_identity(self):
        trace = gen_mixed(500, 0.4, banks=4, seed=3, mapping=MAP)
        rep = run(config(), trace)
        assert rep.hits + rep.empties + rep.misses == rep.reads + rep.writes == 500

    def test_instruction_count(self):
        trace = Trace([MemRequest(7, "read", MAP.encode_flat(0, 1)),
                       MemRequest(3, "read", MAP.encode_flat(0, 1))])
        rep = run(config(), trace)
        assert rep.total_instructions == 7 + 3 + 2

    def test_single_empty_read_report(self):
        rep = run(config(), reads([5]))
        assert rep.misses == 0
        assert rep.rbmpki == 0.0
        assert rep.total_core_cycles == 78

    def test_nonmem_advances_core_time(self):
        rep = run(config(), reads([5], nonmem=100))
        assert rep.total_core_cycles == 100 + 78

    def test_core_clock_scaling(self):
        # a core at twice the DRAM clock reports twice the cycles
        cfg = SimConfig(timing=DEF, policy=policy_preset("open"), core_clock_mhz=4800)
        rep = run(cfg, reads([5]))
        assert rep.total_core_cycles == 2 * 78

    def test_avg_latency_per_class(self):
        rep = run(config(), reads([5, 5, 9]))
        avg = rep.avg_latency_ns()
        assert avg["hit"] == pytest.approx(16.25)
        assert avg["empty"] == pytest.approx(32.5)
        assert avg["miss"] == pytest.approx(48.75)

    def test_json_keys(self):
        rep = run(config(), reads([5]))
        data = rep.to_json_dict()
        assert set(data) == {"total_core_cycles", "reads", "writes", "hits",
                             "empties", "misses", "rbmpki", "avg_latency_ns",
                             "policy_final_idle"}
        assert set(data["avg_latency_ns"]) == {"hit", "empty", "miss"}


class TestDeterminismAndErrors:
    def test_run_is_pure(self):
        trace = gen_mixed(800, 0.5, banks=4, seed=11, mapping=MAP)
        a = run_detailed(config(policy="adaptive"), trace, keep_completions=True,
                         log_commands=True)
        b = run_detailed(config(policy="adaptive"), trace, keep_completions=True,
                         log_commands=True)
        assert a.report == b.report
        assert a.completions == b.completions
        assert a.command_log == b.command_log

    def test_empty_trace_rejected(self):
        with pytest.raises(TraceError):
            run(config(), Trace([]))

    def test_undecodable_address(self):
        trace = Trace([MemRequest(0, "read", 1 << 40)])
        with pytest.raises(TraceError, match="request 1"):
            run(config(), trace)


class TestPracDelta:
    def test_every_miss_costs_twenty_ns(self):
        trace = gen_mixed(2000, 0.5, banks=4, seed=5, mapping=MAP)
        rep_d = run(config(timing=DEF), trace)
        rep_p = run(config(timing=PRAC), trace)
        assert rep_d.misses == rep_p.misses
        delta_per_miss = 48  # 20 ns at 2400 MHz, exactly
        assert rep_p.total_core_cycles - rep_d.total_core_cycles == \
            delta_per_miss * rep_d.misses

    def test_all_hit_trace_identical(self):
        trace = reads([5] * 50)
        assert run(config(timing=DEF), trace).total_core_cycles == \
            run(config(timing=PRAC), trace).total_core_cycles


class TestCommandLogLegality:
    @pytest.mark.parametrize("timing", [DEF, PRAC], ids=["default", "prac"])
    @pytest.mark.parametrize("policy", ["open", "close", "adaptive"])
    def test_mixed_trace_log_legal(self, timing, policy):
        trace = gen_mixed(600, 0.6, banks=8, seed=17, mapping=MAP)
        res = run_detailed(config(timing=timing, policy=policy), trace,
                           log_commands=True)
        assert check_command_log(res.command_log, timing.to_cycles()) == []

    def test_log_sorted_by_tick(self):
        trace = gen_mixed(300, 0.5, banks=8, seed=2, mapping=MAP)
        res = run_detailed(config(policy="adaptive"), trace, log_commands=True)
        ticks = [int(line.split()[0]) for line in res.command_log]
        assert ticks == sorted(ticks)


class TestSbdrPeriod:
    def test_default_matches_quantized_oracle(self):
        assert measure_sbdr_period(DEF) == sbdr_oracle_cycles(DEF) == 116

    def test_prac_matches_quantized_oracle(self):
        assert measure_sbdr_period(PRAC) == sbdr_oracle_cycles(PRAC) == 138

    def test_steady_state_is_flat(self):
        trace = gen_sbdr(32, bank=0, row_a=1, row_b=2, mapping=MAP)
        res = run_detailed(config(policy="close"), trace, keep_completions=True)
        ticks = [c.data_tick for c in res.completions]
        gaps = {b - a for a, b in zip(ticks[4:], ticks[5:])}
        assert len(gaps) == 1
