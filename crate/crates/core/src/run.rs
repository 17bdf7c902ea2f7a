//! Dispatch from a run spec to the builders and verifiers.

use std::time::Instant;

use serde::Serialize;

use crate::assembly::build_as;
use crate::cpp::{admissible_patterns, build_cpp};
use crate::lambda::{
    check_order_1, check_order_2, reshuffle_order, reshuffle_order_2, show, BasedFamily,
};
use crate::report::{Report, Section, Status, Timing};
use crate::selftest::{SelftestConfig, CHECKS};
use crate::spec::{AsSpec, CppSpec, Kind, LambdaSpec, RunSpec, TightSpec, TransversalSpec};
use crate::tight::{distinguish, OrdinalIdx, TightCoding, TightParams};
use crate::transversal::{
    almost_free_sweep, check_result, family_from_lambda_system, find_transversal, SetFamily,
};
use crate::{Error, Result};

struct Sink {
    sections: Vec<Section>,
    timings: Vec<Timing>,
    clock: Instant,
}

impl Sink {
    fn push(&mut self, s: Section) {
        let now = Instant::now();
        self.timings.push(Timing {
            id: s.id.clone(),
            millis: (now - self.clock).as_millis() as u64,
        });
        self.clock = now;
        self.sections.push(s);
    }

    fn add<T: Serialize>(
        &mut self,
        id: impl Into<String>,
        st: Status,
        summary: impl Into<String>,
        data: &T,
    ) -> Result<()> {
        let s = Section::new(id, st, summary).with(data)?;
        self.push(s);
        Ok(())
    }
}

fn pass_or(ok: bool, otherwise: Status) -> Status {
    if ok {
        Status::Pass
    } else {
        otherwise
    }
}

fn list(xs: &[OrdinalIdx]) -> String {
    let v: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", v.join(", "))
}

/// Runs a spec. Timings are recorded only when asked for.
pub fn run(spec: &RunSpec, timings: bool) -> Result<Report> {
    spec.check()?;
    let mut sink = Sink {
        sections: Vec::new(),
        timings: Vec::new(),
        clock: Instant::now(),
    };
    let budget = spec.effective_budget();
    let section = |k: Kind| Error::Usage(format!("missing {} section", k.name()));
    match spec.kind {
        Kind::TightCoding => tight(
            spec.tight_coding.as_ref().ok_or(section(spec.kind))?,
            budget,
            &mut sink,
        )?,
        Kind::CpPlus => cpp(spec.cp_plus.as_ref().ok_or(section(spec.kind))?, &mut sink)?,
        Kind::LambdaSystem => lambda(
            spec.lambda_system.as_ref().ok_or(section(spec.kind))?,
            budget,
            &mut sink,
        )?,
        Kind::AsConstruction => assembly(
            spec.as_construction.as_ref().ok_or(section(spec.kind))?,
            &mut sink,
        )?,
        Kind::Transversal => transversal(
            spec.transversal.as_ref().ok_or(section(spec.kind))?,
            &mut sink,
        )?,
        Kind::Selftest => selftest(spec, &mut sink)?,
    }
    let mut r = Report::new(spec);
    r.sections = sink.sections;
    if timings {
        r.timings = Some(sink.timings);
    }
    Ok(r)
}

fn tight(t: &TightSpec, budget: usize, sink: &mut Sink) -> Result<()> {
    let build = |s: &[OrdinalIdx]| {
        TightCoding::build(&TightParams {
            k_max: t.k_max,
            s: s.to_vec(),
            budget,
            ladders: t.ladders.clone(),
        })
    };
    let tc = build(&t.s)?;
    let rows = tc.fidelity(budget, t.mode)?;
    let bad = rows.iter().filter(|r| !r.ok()).count();
    sink.add(
        "fidelity",
        pass_or(bad == 0, Status::Violation),
        format!("{} stages, {bad} with failed recursion checks", rows.len()),
        &rows,
    )?;
    for alpha in tc.limits() {
        let coded = tc.coded().contains(&alpha);
        let non_rc = tc.non_rc_attempt(alpha, budget)?;
        let rc = tc.rc_attempt(alpha, budget)?;
        let (st, summary) = match (coded, non_rc.passed, rc.stable) {
            (true, true, false) => (
                Status::Finding,
                "non-rc certificate present, lpr stamps unstable",
            ),
            (false, false, true) => (Status::Pass, "non-rc attempt refuted, lpr stamps stable"),
            _ => (Status::Violation, "verdicts disagree with the coded set"),
        };
        sink.add(
            format!("limit:{alpha}"),
            st,
            summary,
            &serde_json::json!({ "coded": coded, "non_rc": non_rc, "rc": rc }),
        )?;
    }
    let mut rows = Vec::new();
    for beta in tc.coded().iter().copied() {
        for delta in tc.scope().into_iter().filter(|d| *d <= beta) {
            rows.push(tc.closed_form(tc.localizer(), beta, delta, budget)?);
        }
    }
    let bad = rows
        .iter()
        .filter(|r| !r.mismatched_stages.is_empty())
        .count();
    sink.add(
        "closed-form",
        pass_or(bad == 0, Status::Violation),
        format!("{} (β, δ) pairs, {bad} mismatched", rows.len()),
        &rows,
    )?;
    let fp = tc.fingerprint(budget)?;
    sink.add(
        "fingerprint",
        pass_or(fp.equals_coded && fp.dichotomy_holds, Status::Violation),
        format!("non-rc at {}, coded {}", list(&fp.non_rc), list(&fp.coded)),
        &fp,
    )?;
    if let Some(other) = &t.compare {
        let tc2 = build(other)?;
        let d = distinguish(&tc, &tc2, budget)?;
        let (st, summary) = match (d.both_exact, d.differ) {
            (true, true) => (Status::Pass, "fingerprints differ"),
            (true, false) => (
                Status::Finding,
                "fingerprints agree: the coded sets are equal",
            ),
            _ => (Status::Violation, "a fingerprint is not exact"),
        };
        sink.add("distinguish", st, summary, &d)?;
    }
    Ok(())
}

fn cpp(c: &CppSpec, sink: &mut Sink) -> Result<()> {
    let p = c.params();
    let t = build_cpp(&p)?;
    let ii = t.verify_clause_ii()?;
    let summary = if ii.degenerate {
        "single column, nothing to escape into"
    } else if ii.passed {
        "H is not rc in K nor in L"
    } else {
        "escape certificate failed"
    };
    sink.add(
        "clause-ii",
        pass_or(ii.passed, Status::Violation),
        summary,
        &ii,
    )?;
    let patterns = c
        .patterns
        .clone()
        .unwrap_or_else(|| admissible_patterns(p.n, p.l_max));
    let mut certs = Vec::new();
    let mut skipped = 0;
    for j in &patterns {
        if j.admissible() {
            certs.push(t.verify_clause_i(j)?);
        } else {
            skipped += 1;
        }
    }
    let unstable = certs.iter().filter(|c| !c.stable).count();
    sink.add(
        "clause-i",
        pass_or(unstable == 0, Status::Violation),
        format!(
            "{} patterns, {unstable} unstable, {skipped} not admissible",
            certs.len()
        ),
        &certs,
    )?;
    let law = t.ideal_law()?;
    sink.add(
        "ideal-law",
        pass_or(law.holds(), Status::Violation),
        "K↾x is the ideal of the column products",
        &law,
    )?;
    let law = t.block_law()?;
    sink.add(
        "block-law",
        pass_or(law.holds(), Status::Violation),
        "blocks meet x only through their columns",
        &law,
    )?;
    Ok(())
}

fn lambda_checks(f: &BasedFamily, budget: usize, sink: &mut Sink) -> Result<bool> {
    let v = f.validate();
    if !v.is_empty() {
        let first = v[0].to_string();
        sink.add(
            "validate",
            Status::Violation,
            format!("{} violations, first: {first}", v.len()),
            &v,
        )?;
        return Ok(false);
    }
    sink.add(
        "validate",
        Status::Pass,
        "family is based on a λ-system",
        &f.system.height(),
    )?;
    let sys = &f.system;
    let all = sys.finals();
    let mut rows = Vec::new();
    let (mut missing, mut bad) = (0, 0);
    for eta0 in &all {
        let r = reshuffle_order(f, &all, eta0, budget)?;
        match &r.order {
            Some(o) => bad += usize::from(!check_order_1(f, &all, eta0, o).is_empty()),
            None => missing += 1,
        }
        rows.push(serde_json::json!({ "first": show(eta0), "search": r }));
    }
    let st = if bad > 0 {
        Status::Violation
    } else {
        pass_or(missing == 0, Status::Finding)
    };
    sink.add(
        "reshuffle-1",
        st,
        format!(
            "{} starting nodes, {missing} without an ordering",
            all.len()
        ),
        &rows,
    )?;
    let mut rows = Vec::new();
    let (mut missing, mut bad) = (0, 0);
    for mu in sys.nodes.iter().filter(|n| !sys.is_final(&n.node)) {
        let below: Vec<_> = all
            .iter()
            .filter(|e| e.len() > mu.node.len() && e[..mu.node.len()] == mu.node[..])
            .cloned()
            .collect();
        if below.len() >= mu.rank {
            continue;
        }
        for alpha in std::iter::once(None).chain((0..mu.rank).map(Some)) {
            let r = reshuffle_order_2(f, &mu.node, alpha, &below, budget)?;
            match &r.order {
                Some(o) => {
                    bad += usize::from(!check_order_2(f, &mu.node, alpha, &below, o).is_empty())
                }
                None => missing += 1,
            }
            rows.push(serde_json::json!({ "mu": show(&mu.node), "alpha": alpha, "search": r }));
        }
    }
    let st = if bad > 0 {
        Status::Violation
    } else {
        pass_or(missing == 0, Status::Finding)
    };
    sink.add(
        "reshuffle-2",
        st,
        format!("{} (μ, α) cases, {missing} without an ordering", rows.len()),
        &rows,
    )?;
    Ok(true)
}

fn lambda(l: &LambdaSpec, budget: usize, sink: &mut Sink) -> Result<()> {
    if lambda_checks(&l.family, budget, sink)? {
        let sets = family_from_lambda_system(&l.family)?;
        transversal_section(&sets, sink)?;
    }
    Ok(())
}

fn assembly(a: &AsSpec, sink: &mut Sink) -> Result<()> {
    let f = &a.family;
    let asm = build_as(f, &a.params)?;
    sink.add(
        "quotient",
        Status::Pass,
        format!(
            "{} atoms in the coproduct, {} after {} identifications",
            asm.g.atom_count(),
            asm.a.atom_count(),
            asm.theta_pairs.len()
        ),
        &asm.theta_pairs,
    )?;
    let lambda = f.system.root().map_or(0, |r| r.rank);
    let mut rows = Vec::new();
    for beta in 0..lambda {
        for alpha in std::iter::once(None).chain((0..beta).map(Some)) {
            rows.push(asm.claim1_verify(alpha, beta)?);
        }
    }
    let failed = rows.iter().filter(|d| !d.holds()).count();
    sink.add(
        "claim-1",
        pass_or(failed == 0, Status::Finding),
        format!(
            "{} (α, β) pairs, {failed} without a decomposition",
            rows.len()
        ),
        &rows,
    )?;
    let mut rows = Vec::new();
    for alpha in 0..asm.top() {
        let Some(n) = f.system.get(&[alpha]) else {
            continue;
        };
        if f.system.is_final(&n.node) {
            continue;
        }
        for beta in 0..n.rank {
            rows.push(asm.claim2_verify(alpha, beta)?);
        }
    }
    if !rows.is_empty() {
        let failed = rows.iter().filter(|d| !d.holds()).count();
        sink.add(
            "claim-2",
            pass_or(failed == 0, Status::Finding),
            format!(
                "{} (α, β) pairs, {failed} without a decomposition",
                rows.len()
            ),
            &rows,
        )?;
    }
    let g = asm.gamma_diagnostic()?;
    let marked = f.system.marked_root_indices();
    let summary = format!("flagged {:?}, declared markers {marked:?}", g.flagged);
    sink.add(
        "gamma",
        pass_or(g.flagged == marked, Status::Finding),
        summary,
        &g,
    )?;
    for alpha in marked {
        let m = asm.rc_at_marked_stages(alpha)?;
        let summary = format!(
            "{} covered elements, complete: {}",
            m.elements.len(),
            m.complete
        );
        sink.add(
            format!("rc-marked:{alpha}"),
            pass_or(m.complete, Status::Finding),
            summary,
            &m,
        )?;
    }
    Ok(())
}

fn transversal_section(f: &SetFamily, sink: &mut Sink) -> Result<()> {
    let r = find_transversal(f);
    let st = if !check_result(f, &r) {
        Status::Violation
    } else {
        pass_or(r.is_free(), Status::Finding)
    };
    let summary = if r.is_free() {
        "free"
    } else {
        "Hall violator found"
    };
    sink.add("transversal", st, summary, &r)
}

fn transversal(t: &TransversalSpec, sink: &mut Sink) -> Result<()> {
    transversal_section(&t.family, sink)?;
    if t.almost_free {
        let r = almost_free_sweep(&t.family)?;
        let summary = format!("almost free: {}, free: {}", r.almost_free, r.free);
        sink.add("almost-free", Status::Pass, summary, &r)?;
    }
    Ok(())
}

fn selftest(spec: &RunSpec, sink: &mut Sink) -> Result<()> {
    let mut cfg = spec.selftest.clone().unwrap_or_default();
    cfg.seed = spec.seed;
    if let Some(b) = spec.budget {
        cfg.tight_budget = b;
    }
    let cfg: &SelftestConfig = &cfg;
    let results: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = CHECKS
            .iter()
            .map(|f| {
                s.spawn(move || {
                    let t = Instant::now();
                    (f(cfg), t.elapsed())
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("selftest check panicked"))
            .collect()
    });
    for (r, took) in results {
        let c = r?;
        let mut summary = format!(
            "criterion {}: {} cases, {} failures",
            c.criterion, c.cases, c.failures
        );
        if !c.passed {
            summary += &format!(" ({})", c.notes.join("; "));
        }
        let id = format!("selftest:{}", c.id);
        sink.sections
            .push(Section::new(&*id, pass_or(c.passed, Status::Violation), summary).with(&c)?);
        sink.timings.push(Timing {
            id,
            millis: took.as_millis() as u64,
        });
    }
    Ok(())
}
