//! The brute-force oracle suite. Every check is seeded and deterministic;
//! wall-clock time is kept outside the report.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::assembly::{build_as, AsFixture};
use crate::bitset::AtomSet;
use crate::cpp::{admissible_patterns, build_cpp, CppParams};
use crate::kernel::{adjoin_element, generated_subalgebra, is_free_over, FiniteBA, SubalgebraDesc};
use crate::lambda::Height;
use crate::oracle;
use crate::tight::{
    distinguish, FidelityMode, OrdinalIdx, TightCoding, TightParams, ZeroProductEvaluator,
};
use crate::transversal::oracle_sweep;
use crate::Result;

pub const HEIGHT2_FIXTURE: &str = include_str!("../fixtures/height2.json");
pub const DISJOINT_FIXTURE: &str = include_str!("../fixtures/disjoint.json");
pub const COUNTER_FIXTURE: &str = include_str!("../fixtures/counter.json");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SelftestConfig {
    pub seed: u64,
    pub kernel_cases: usize,
    pub adjoin_cases: usize,
    pub tight_k_max: usize,
    pub tight_budget: usize,
    pub zero_max_size: usize,
    pub free_max_atoms: usize,
    pub cpp_n_max: usize,
    pub cpp_l_max: usize,
    pub cpp_w_max: usize,
    pub transversal_cases: usize,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            kernel_cases: 1000,
            adjoin_cases: 200,
            tight_k_max: 3,
            tight_budget: 8,
            zero_max_size: 6,
            free_max_atoms: 8,
            cpp_n_max: 3,
            cpp_l_max: 3,
            cpp_w_max: 1,
            transversal_cases: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub criterion: u8,
    pub passed: bool,
    pub cases: u64,
    pub failures: u64,
    pub notes: Vec<String>,
}

impl Check {
    fn new(id: &str, criterion: u8) -> Self {
        Self {
            id: id.into(),
            criterion,
            passed: true,
            cases: 0,
            failures: 0,
            notes: Vec::new(),
        }
    }

    fn case(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            self.passed = false;
            if self.notes.len() < 8 {
                self.notes.push(what());
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub config: SelftestConfig,
    pub checks: Vec<Check>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn mask_elem(ba: &FiniteBA, mask: u32) -> Result<crate::kernel::Elem> {
    ba.elem(AtomSet::from_mask(ba.atom_count(), mask as u64))
}

/// lpr against the brute-force maximum, plus duality, the meet law and
/// composition through an intermediate subalgebra.
pub fn kernel_lpr(cfg: &SelftestConfig) -> Result<Check> {
    let mut c = Check::new("kernel-lpr", 1);
    let mut r = rng(cfg.seed, 1);
    for case in 0..cfg.kernel_cases {
        let n = r.gen_range(1..=crate::ORACLE_ATOMS);
        let full = oracle::full(n);
        let k = r.gen_range(0..=3);
        let gens: Vec<u32> = (0..k).map(|_| r.gen::<u32>() & full).collect();
        let (a, b) = (r.gen::<u32>() & full, r.gen::<u32>() & full);
        let j = r.gen_range(0..=k);
        let ba = FiniteBA::new(n)?;
        let ge = gens
            .iter()
            .map(|&g| mask_elem(&ba, g))
            .collect::<Result<Vec<_>>>()?;
        let sub = generated_subalgebra(&ba, &ge)?;
        let inner = generated_subalgebra(&ba, &ge[..j])?;
        let elems = oracle::closure(n, &gens);
        let (ea, eb) = (mask_elem(&ba, a)?, mask_elem(&ba, b)?);
        let lpr_b = sub.lpr(&ba, &eb)?;
        let m = |e: &crate::kernel::Elem| e.atoms().to_mask() as u32;
        c.case(m(&lpr_b) == oracle::lpr(&elems, b), || {
            format!("case {case}: lpr")
        });
        let upr = sub.upr(&ba, &eb)?;
        c.case(
            m(&upr) == oracle::upr(&elems, b)
                && upr == sub.lpr(&ba, &eb.complement())?.complement(),
            || format!("case {case}: duality"),
        );
        c.case(
            sub.lpr(&ba, &ea.meet(&eb)?)? == sub.lpr(&ba, &ea)?.meet(&lpr_b)?,
            || format!("case {case}: meet law"),
        );
        c.case(inner.lpr(&ba, &lpr_b)? == inner.lpr(&ba, &eb)?, || {
            format!("case {case}: composition")
        });
    }
    Ok(c)
}

/// `e[A]↾x = e[A↾I]` and `e[A]↾-x = e[A↾J]`, over every element of `A`.
pub fn adjoin_exactness(cfg: &SelftestConfig) -> Result<Check> {
    let mut c = Check::new("adjoin-element", 2);
    let mut r = rng(cfg.seed, 2);
    for case in 0..cfg.adjoin_cases {
        let n = r.gen_range(1..=8);
        let full = oracle::full(n);
        let i = r.gen::<u32>() & full;
        let j = r.gen::<u32>() & full & !i;
        let ba = FiniteBA::new(n)?;
        let adj = adjoin_element(&ba, &mask_elem(&ba, i)?, &mask_elem(&ba, j)?)?;
        let neg = adj.x.complement();
        let mut ok = true;
        for a in 0..=full {
            let e = adj.embedding.apply(&adj.algebra, &mask_elem(&ba, a)?)?;
            ok &= e.leq(&adj.x)? == (a & !i == 0);
            ok &= e.leq(&neg)? == (a & !j == 0);
        }
        c.case(ok, || format!("case {case}: n={n} I={i:#x} J={j:#x}"));
    }
    Ok(c)
}

fn coded_sets(k_max: usize) -> Vec<Vec<OrdinalIdx>> {
    let limits: Vec<OrdinalIdx> = (1..k_max).map(|k| OrdinalIdx::new(k, 0)).collect();
    (0u32..1 << limits.len())
        .map(|m| {
            (0..limits.len())
                .filter(|i| m >> i & 1 == 1)
                .map(|i| limits[i])
                .collect()
        })
        .collect()
}

fn tight(k_max: usize, s: &[OrdinalIdx], budget: usize) -> Result<TightCoding> {
    TightCoding::build(&TightParams {
        k_max,
        s: s.to_vec(),
        budget,
        ladders: None,
    })
}

/// Recursion fidelity, the non-rc/rc dichotomy and the closed form, for
/// every coded set at every `K_max` up to the configured one.
pub fn tight_fidelity(cfg: &SelftestConfig) -> Result<Check> {
    let mut c = Check::new("tight-fidelity", 3);
    let budget = cfg.tight_budget;
    for k_max in 1..=cfg.tight_k_max {
        for s in coded_sets(k_max) {
            let tc = tight(k_max, &s, budget)?;
            let label = format!("K_max={k_max} S={s:?}");
            let rows = tc.fidelity(budget, FidelityMode::Localized)?;
            c.case(rows.iter().all(|r| r.ok()), || format!("{label}: fidelity"));
            for alpha in tc.limits() {
                let passed = tc.non_rc_attempt(alpha, budget)?.passed;
                c.case(passed == s.contains(&alpha), || {
                    format!("{label}: non-rc at {alpha}")
                });
            }
            for alpha in tc.scope() {
                let stable = tc.rc_attempt(alpha, budget)?.stable;
                c.case(stable != s.contains(&alpha), || {
                    format!("{label}: rc stamps at {alpha}")
                });
            }
            for &beta in &s {
                for delta in tc.scope().into_iter().filter(|d| *d <= beta) {
                    let row = tc.closed_form(tc.localizer(), beta, delta, budget)?;
                    c.case(row.mismatched_stages.is_empty(), || {
                        format!("{label}: closed form β={beta} δ={delta}")
                    });
                }
            }
        }
    }
    Ok(c)
}

pub fn zero_products(cfg: &SelftestConfig) -> Result<Check> {
    let mut c = Check::new("zero-product", 4);
    for k_max in 1..=cfg.tight_k_max {
        for s in coded_sets(k_max) {
            let tc = tight(k_max, &s, cfg.tight_budget)?;
            let sweep = ZeroProductEvaluator::new(&tc)?.sweep(cfg.zero_max_size);
            c.cases += sweep.cases;
            c.failures += sweep.disagreements;
            if sweep.disagreements > 0 {
                c.passed = false;
                c.notes.push(format!(
                    "K_max={k_max} S={s:?}: {} disagreements",
                    sweep.disagreements
                ));
            }
        }
    }
    Ok(c)
}

pub fn distinguishing(cfg: &SelftestConfig) -> Result<Check> {
    let mut c = Check::new("distinguish", 5);
    let k_max = cfg.tight_k_max;
    let budget = cfg.tight_budget;
    let sets = coded_sets(k_max);
    let built: Vec<TightCoding> = sets
        .iter()
        .map(|s| tight(k_max, s, budget))
        .collect::<Result<_>>()?;
    for i in 0..sets.len() {
        for j in 0..sets.len() {
            if i == j {
                continue;
            }
            let r = distinguish(&built[i], &built[j], budget)?;
            c.case(r.differ && r.both_exact, || {
                format!("{:?} vs {:?}", sets[i], sets[j])
            });
        }
    }
    Ok(c)
}

pub fn cpp_clauses(cfg: &SelftestConfig) -> Result<Check> {
    let mut c = Check::new("cp-plus", 6);
    for n in 1..=cfg.cpp_n_max {
        for l_max in 1..=cfg.cpp_l_max {
            for w in 0..=cfg.cpp_w_max {
                let t = build_cpp(&CppParams { n, l_max, w })?;
                let label = format!("n={n} l_max={l_max} w={w}");
                let ii = t.verify_clause_ii()?;
                c.case(ii.passed && ii.degenerate == (l_max < 2), || {
                    format!("{label}: clause ii")
                });
                c.case(t.ideal_law()?.holds(), || format!("{label}: ideal law"));
                c.case(t.block_law()?.holds(), || format!("{label}: block law"));
                for j in admissible_patterns(n, l_max) {
                    let stable = t.verify_clause_i(&j)?.stable;
                    c.case(stable, || format!("{label}: clause i for {j:?}"));
                }
            }
        }
    }
    Ok(c)
}

fn partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut cur: Vec<Vec<usize>> = Vec::new();
    fn go(i: usize, n: usize, cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..cur.len() {
            cur[b].push(i);
            go(i + 1, n, cur, out);
            cur[b].pop();
        }
        cur.push(vec![i]);
        go(i + 1, n, cur, out);
        cur.pop();
    }
    go(0, n, &mut cur, &mut out);
    out
}

/// `is_free_over` against exhaustive witness search, over every subalgebra
/// of every algebra with at most `free_max_atoms` atoms.
pub fn free_over(cfg: &SelftestConfig) -> Result<Check> {
    let mut c = Check::new("free-over", 7);
    for n in 1..=cfg.free_max_atoms {
        let ba = FiniteBA::new(n)?;
        for blocks in partitions(n) {
            let sub = SubalgebraDesc::from_blocks(&ba, &blocks)?;
            let masks: Vec<u32> = blocks
                .iter()
                .map(|b| b.iter().fold(0u32, |acc, &a| acc | 1 << a))
                .collect();
            let brute = oracle::free_search(n, &oracle::elements_of_blocks(&masks)).is_some();
            c.case(is_free_over(&ba, &sub)? == brute, || {
                format!("n={n} blocks={blocks:?}")
            });
        }
    }
    Ok(c)
}

/// The shipped fixtures. The last case compares the Γ shadow of the
/// height-2 fixture with its declared markers.
pub fn as_fixtures(_cfg: &SelftestConfig) -> Result<Check> {
    let mut c = Check::new("as-fixtures", 8);
    let fx = AsFixture::parse(HEIGHT2_FIXTURE)?;
    let f = &fx.family;
    let v = f.validate();
    c.case(v.is_empty(), || format!("height-2 validate: {v:?}"));
    c.case(f.system.height() == Height::Uniform(2), || {
        "height-2: height".into()
    });
    let asm = build_as(f, &fx.params)?;
    let lambda = f.system.root().map_or(0, |r| r.rank);
    let mut claim1 = true;
    for beta in 0..lambda {
        for alpha in std::iter::once(None).chain((0..beta).map(Some)) {
            claim1 &= asm.claim1_verify(alpha, beta)?.holds();
        }
    }
    c.case(claim1, || "height-2: claim 1".into());
    let mut claim2 = true;
    for alpha in 0..asm.top() {
        let rank = f.system.get(&[alpha]).map_or(0, |n| n.rank);
        for beta in 0..rank {
            claim2 &= asm.claim2_verify(alpha, beta)?.holds();
        }
    }
    c.case(claim2, || "height-2: claim 2".into());
    let marked = f.system.marked_root_indices();
    let mut rc = !marked.is_empty();
    for &alpha in &marked {
        rc &= asm.rc_at_marked_stages(alpha)?.complete;
    }
    c.case(rc, || "height-2: rc at marked stages".into());
    let disjoint = AsFixture::parse(DISJOINT_FIXTURE)?;
    let g = build_as(&disjoint.family, &disjoint.params)?.gamma_diagnostic()?;
    c.case(g.flagged.is_empty(), || {
        format!("disjoint: Γ shadow {:?}", g.flagged)
    });
    let counter = AsFixture::parse(COUNTER_FIXTURE)?;
    let g = build_as(&counter.family, &counter.params)?.gamma_diagnostic()?;
    c.case(!g.flagged.is_empty(), || "counter: Γ shadow empty".into());
    let g = asm.gamma_diagnostic()?;
    c.case(g.flagged == marked, || {
        format!(
            "height-2: Γ shadow {:?}, declared markers {marked:?}",
            g.flagged
        )
    });
    Ok(c)
}

pub fn transversals(cfg: &SelftestConfig) -> Result<Check> {
    let mut c = Check::new("transversal", 9);
    let s = oracle_sweep(&mut rng(cfg.seed, 9), cfg.transversal_cases, 8, 6, 10);
    c.cases = s.cases as u64;
    c.failures = (s.disagreements + s.bad_violators) as u64;
    c.passed = c.failures == 0;
    c.notes
        .push(format!("{} of {} families free", s.free, s.cases));
    Ok(c)
}

type CheckFn = fn(&SelftestConfig) -> Result<Check>;

pub const CHECKS: [CheckFn; 9] = [
    kernel_lpr,
    adjoin_exactness,
    tight_fidelity,
    zero_products,
    distinguishing,
    cpp_clauses,
    free_over,
    as_fixtures,
    transversals,
];

/// Runs every check in order, with the time each took.
pub fn run_selftest_timed(cfg: &SelftestConfig) -> Result<(SelftestReport, Vec<Duration>)> {
    let mut checks = Vec::new();
    let mut times = Vec::new();
    for f in CHECKS {
        let t = Instant::now();
        checks.push(f(cfg)?);
        times.push(t.elapsed());
    }
    Ok((
        SelftestReport {
            config: cfg.clone(),
            checks,
        },
        times,
    ))
}

pub fn run_selftest(cfg: &SelftestConfig) -> Result<SelftestReport> {
    Ok(run_selftest_timed(cfg)?.0)
}
