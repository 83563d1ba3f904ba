use std::fmt;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::props::{
    antisymmetry_check, balancing_sweep, factorization_check, legs_partition_sweep, pentagon_check,
    truncation_check,
};
use super::{oracle_check_within, route_sweep, soft_identity};
use crate::algebra::oracle::nil_product;
use crate::algebra::{rat, Levels, Mode, NilMonomial};
use crate::error::{Error, Result};
use crate::euler::{
    closed_form_k2, framed_coefficient, kronecker_euler, kronecker_euler_with, Framing, K2Kind,
    Route,
};
use crate::quiver::{build_covering_fragment, small_fragments, DimVec, Quiver, RootKind, Slope};
use crate::sorting::{initial_diagram, SortOptions, SortingDiagram};
use crate::tropical::{stable_diagram, CurveCatalog};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tier {
    Default,
    /// Adds k = 3 to the oracle sweep on every small fragment.
    Slow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Reported, never asserted.
    Soft(bool),
}

/// One acceptance criterion.
#[derive(Clone, Debug)]
pub struct CheckLine {
    pub id: u8,
    pub title: &'static str,
    pub status: Status,
    pub detail: Vec<String>,
    pub elapsed: Duration,
}

impl CheckLine {
    pub fn is_hard_failure(&self) -> bool {
        self.status == Status::Fail
    }
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Soft(true) => "SOFT-PASS",
            Status::Soft(false) => "SOFT-FAIL",
        };
        write!(
            f,
            "[{tag}] {}. {} ({:.2?})",
            self.id, self.title, self.elapsed
        )?;
        for d in &self.detail {
            write!(f, "\n    {d}")?;
        }
        Ok(())
    }
}

struct Check {
    ok: bool,
    detail: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Check {
            ok: true,
            detail: Vec::new(),
        }
    }

    fn expect(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        self.detail
            .push(format!("{} {what}", if ok { "ok  " } else { "FAIL" }));
        self.ok &= ok;
    }
}

fn timed(id: u8, title: &'static str, f: impl FnOnce() -> Result<Check>) -> CheckLine {
    let t = Instant::now();
    let (status, detail) = match f() {
        Ok(c) => (if c.ok { Status::Pass } else { Status::Fail }, c.detail),
        Err(e) => (Status::Fail, vec![format!("error: {e}")]),
    };
    CheckLine {
        id,
        title,
        status,
        detail,
        elapsed: t.elapsed(),
    }
}

fn names(d: &SortingDiagram, seq: &[usize]) -> Vec<String> {
    seq.iter().map(|&i| d.node(i).op.d.to_string()).collect()
}

fn naive_with_history(q: &Quiver) -> Result<SortingDiagram> {
    SortingDiagram::new(
        q,
        None,
        SortOptions {
            keep_history: true,
            ..Default::default()
        },
    )
}

pub fn q1() -> Quiver {
    Quiver::from_arrows(2, 2, 1, &[(2, 0), (2, 1)]).expect("Q1")
}

pub fn q2() -> Quiver {
    Quiver::from_arrows(2, 3, 2, &[(3, 0), (3, 1), (4, 1), (4, 2)]).expect("Q2")
}

pub fn q3() -> Quiver {
    Quiver::from_arrows(3, 4, 3, &[(4, 0), (4, 1), (5, 1), (5, 2), (6, 1), (6, 3)]).expect("Q3")
}

fn golden(c: &mut Check, d: &SortingDiagram, expected: &[&[&str]]) {
    for (i, want) in expected.iter().enumerate() {
        let got = d.history().get(i).map(|s| names(d, s)).unwrap_or_default();
        c.expect(got == *want, format!("S^{i} = {}", got.join(", ")));
    }
}

fn criterion1() -> Result<Check> {
    let t = Instant::now();
    let mut c = Check::new();
    let mut d = naive_with_history(&q1())?;
    d.stabilize()?;
    golden(
        &mut c,
        &d,
        &[
            &["i1", "i2", "i3"],
            &["i1", "i3", "i2+i3", "i2"],
            &["i3", "i1+i3", "i2+i3", "i1+i2+i3", "i1", "i2"],
        ],
    );
    c.expect(
        d.stabilization_index() == 2,
        format!("stable from S^{}", d.stabilization_index()),
    );
    c.expect(
        t.elapsed() < Duration::from_secs(1),
        format!("runtime {:.2?} < 1 s", t.elapsed()),
    );
    Ok(c)
}

fn criterion2() -> Result<Check> {
    let t = Instant::now();
    let mut c = Check::new();
    let mut d = naive_with_history(&q2())?;
    d.stabilize()?;
    golden(
        &mut c,
        &d,
        &[
            &["i1", "i2", "i3", "i4", "i5"],
            &["i1", "i2", "i4", "i5", "i3+i5", "i3"],
            &[
                "i1", "i4", "i2+i4", "i5", "i2+i5", "i3+i5", "i2+i3+i5", "i2", "i3",
            ],
            &[
                "i4", "i1+i4", "i2+i4", "i1+i2+i4", "i5", "i2+i5", "i3+i5", "i2+i3+i5", "i1", "i2",
                "i3",
            ],
            &[
                "i4",
                "i1+i4",
                "i2+i4",
                "i5",
                "i1+i2+i4+i5",
                "i2+i5",
                "i3+i5",
                "i1+i2+i3+i4+i5",
                "i1+i2+i4",
                "i2+i3+i5",
                "i1",
                "i2",
                "i3",
            ],
        ],
    );
    c.expect(
        d.stabilization_index() == 6,
        format!("stable from S^{}", d.stabilization_index()),
    );
    c.expect(
        t.elapsed() < Duration::from_secs(1),
        format!("runtime {:.2?} < 1 s", t.elapsed()),
    );
    Ok(c)
}

fn criterion3() -> Result<Check> {
    let mut c = Check::new();
    let q = q3();
    let mut d = initial_diagram(&q, 1, Mode::Naive)?;
    match d.stabilize() {
        Err(Error::Assumption(v)) => {
            c.expect(
                v.bracket == -1,
                format!("naive mode halts with <xi, eta> = {}", v.bracket),
            );
            c.expect(
                v.step == 6,
                format!(
                    "violation met at the S^{} -> S^{} step, expected S^6 -> S^7",
                    v.step,
                    v.step + 1
                ),
            );
            c.detail
                .push(format!("     offending pair {} and {}", v.d1, v.d2));
        }
        other => c.expect(false, format!("naive mode did not halt: {other:?}")),
    }
    for k in [1, 2] {
        let t = Instant::now();
        let levels = Levels::uniform(q.n(), k)?;
        let mut d = SortingDiagram::new(
            &q,
            Some(levels.clone()),
            SortOptions {
                max_steps: Some(200_000_000),
                ..Default::default()
            },
        )?;
        let before = nil_product(&q, &d.ops(), &levels)?;
        d.stabilize()?;
        let after = nil_product(&q, &d.ops(), &levels)?;
        let bound = d.step_bound().unwrap_or(0);
        c.expect(
            before == after,
            format!("k={k}: stable diagram passes the oracle"),
        );
        c.expect(
            d.step_count() <= bound,
            format!(
                "k={k}: {} steps against the bound (s+S)k = {bound}",
                d.step_count()
            ),
        );
        c.expect(
            d.max_generation() < bound,
            format!("k={k}: genealogy depth {} < {bound}", d.max_generation()),
        );
        if k == 2 {
            c.expect(
                t.elapsed() < Duration::from_secs(10),
                format!("k=2 runtime {:.2?} < 10 s", t.elapsed()),
            );
        }
    }
    Ok(c)
}

/// Sorting steps allowed per fragment and level count in the sweep.
fn sweep_budget(k: u32, tier: Tier) -> usize {
    match (k, tier) {
        (1, _) => 50_000_000,
        (_, Tier::Default) => 3_000_000,
        (_, Tier::Slow) => 30_000_000,
    }
}

fn criterion4(tier: Tier, rng: &mut ChaCha8Rng) -> Result<Check> {
    use rand::seq::SliceRandom;
    let t = Instant::now();
    let mut c = Check::new();
    for m in [2, 3] {
        let frags = small_fragments(m, 8)?;
        for k in [1, 2] {
            let budget = sweep_budget(k, tier);
            let (mut ok, mut bad, mut over) = (0, 0, Vec::new());
            for q in &frags {
                match oracle_check_within(q, k, budget) {
                    Ok(None) => ok += 1,
                    Ok(Some(_)) => bad += 1,
                    Err(Error::Cap(_)) => over.push(q.n()),
                    Err(e) => return Err(e),
                }
            }
            c.expect(
                bad == 0,
                format!(
                    "m={m} k={k}: {ok} of {} fragments agree with the oracle, {bad} differ",
                    frags.len()
                ),
            );
            over.sort_unstable();
            c.expect(
                over.is_empty(),
                format!(
                    "m={m} k={k}: {} fragments not stable within {budget} steps (sizes {over:?})",
                    over.len()
                ),
            );
        }
        let limit = if tier == Tier::Slow { 4 } else { 3 };
        let small: Vec<&Quiver> = frags.iter().filter(|q| q.n() <= limit).collect();
        let sample: Vec<&Quiver> = if tier == Tier::Slow {
            small
        } else {
            small.choose_multiple(rng, 3).copied().collect()
        };
        let budget = sweep_budget(3, tier);
        let (mut bad, mut over) = (0, 0);
        for q in &sample {
            match oracle_check_within(q, 3, budget) {
                Ok(None) => {}
                Ok(Some(_)) => bad += 1,
                Err(Error::Cap(_)) => over += 1,
                Err(e) => return Err(e),
            }
        }
        c.expect(
            bad == 0 && over == 0,
            format!("m={m} k=3: {} sampled fragments of at most {limit} vertices, {bad} differ, {over} over budget", sample.len()),
        );
    }
    c.expect(
        t.elapsed() < Duration::from_secs(300),
        format!("runtime {:.2?} < 5 min", t.elapsed()),
    );
    Ok(c)
}

fn criterion5() -> Result<Check> {
    let t = Instant::now();
    let mut c = Check::new();
    let mut cases = Vec::new();
    for a in 1..=3 {
        cases.push(((a, a + 1), a, K2Kind::Below));
        cases.push(((a + 1, a), a, K2Kind::Above));
        cases.push(((a, a), 1, K2Kind::Diagonal));
    }
    for (dbar, a, kind) in cases {
        let series = closed_form_k2(a, kind, 10)?;
        let exp = [dbar.0, dbar.1];
        let want = series.coefficient(&exp, NilMonomial::EMPTY);
        let got = kronecker_euler(2, dbar, Framing::B)?;
        c.expect(
            want == rat(got),
            format!("dbar={dbar:?}: chi = {got}, closed form {want}"),
        );
    }
    c.expect(
        t.elapsed() < Duration::from_secs(600),
        format!("runtime {:.2?} < 10 min", t.elapsed()),
    );
    Ok(c)
}

fn criterion6() -> Result<Check> {
    let t = Instant::now();
    let mut c = Check::new();
    let q = build_covering_fragment(2, 4, RootKind::Source)?;
    c.expect(
        q.num_sinks() == 4 && q.num_sources() == 3,
        format!(
            "fragment has {} sinks, {} sources",
            q.num_sinks(),
            q.num_sources()
        ),
    );
    let d = stable_diagram(&q, 1, None)?;
    let cat = CurveCatalog::new(&d, Slope::new(2, 5)?)?;
    let mut legs: Vec<String> = cat
        .curves
        .iter()
        .filter(|h| h.ops.len() == 1)
        .map(|h| {
            let v: Vec<String> = h
                .family
                .iter()
                .map(|&(v, _)| Quiver::vertex_label(v))
                .collect();
            format!("{{{}}}", v.join(","))
        })
        .collect();
    legs.sort();
    c.expect(
        legs == ["{i1,i2,i3,i5,i6}", "{i2,i3,i4,i6,i7}"],
        format!("connected curves of slope 2/5: {}", legs.join(" ")),
    );
    let d46 = DimVec::from_entries(vec![1, 2, 2, 1, 1, 2, 1]);
    let levels = Levels::new(vec![1, 2, 2, 1, 1, 2, 1])?;
    let mut local = Vec::new();
    for p in q.source_range() {
        let x = framed_coefficient(&q, &levels, p, &d46, Route::Direct)?;
        local.push(format!("{}: {x}", Quiver::vertex_label(p)));
        if p == 5 {
            c.expect(x == rat(1), format!("chi at i6 of {d46} is {x}"));
        }
    }
    c.detail.push(format!(
        "     framed coefficients on the fragment: {}",
        local.join(", ")
    ));
    let report = kronecker_euler_with(2, (4, 6), Framing::B, Route::Direct)?;
    let factored = report
        .rows
        .iter()
        .filter(|r| r.route == Route::Factor)
        .count();
    c.expect(
        report.total == 1,
        format!(
            "sum over classes and framings: {} ({} terms, {factored} by factorization)",
            report.total,
            report.rows.len()
        ),
    );
    c.expect(
        t.elapsed() < Duration::from_secs(30),
        format!("runtime {:.2?} < 30 s", t.elapsed()),
    );
    Ok(c)
}

fn criterion7() -> Result<Check> {
    let t = Instant::now();
    let mut c = Check::new();
    for m in [2, 3] {
        let frags = small_fragments(m, 6)?;
        for k in [1, 2] {
            let r = route_sweep(&frags, k)?;
            let slopes: Vec<String> = r.failing_slopes.iter().map(|s| s.to_string()).collect();
            c.expect(
                r.passed(),
                format!(
                    "m={m} k={k} on {} fragments: {r}; failing slopes [{}]; first: {}",
                    frags.len(),
                    slopes.join(", "),
                    r.first.as_deref().unwrap_or("-")
                ),
            );
        }
    }
    c.expect(
        t.elapsed() < Duration::from_secs(300),
        format!("runtime {:.2?} < 5 min", t.elapsed()),
    );
    Ok(c)
}

fn criterion8(rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut c = Check::new();
    let mut diagrams = Vec::new();
    for q in [q1(), q2()] {
        let mut d = initial_diagram(&q, 1, Mode::Naive)?;
        d.stabilize()?;
        diagrams.push(d);
    }
    for (q, k) in [(q1(), 1), (q1(), 2), (q2(), 1), (q2(), 2), (q3(), 1)] {
        diagrams.push(stable_diagram(&q, k, None)?);
    }
    for out in [
        pentagon_check(rng, 1000)?,
        antisymmetry_check(rng, 1000)?,
        balancing_sweep(&diagrams)?,
        legs_partition_sweep(&diagrams)?,
        truncation_check(rng, 40)?,
        factorization_check(4)?,
    ] {
        c.expect(out.passed(), out.to_string());
    }
    Ok(c)
}

fn criterion9() -> Result<(bool, Vec<String>)> {
    let mut all = true;
    let mut detail = Vec::new();
    for m in [2, 3] {
        for dbar in [(1, 1), (1, 2), (2, 3)] {
            let s = soft_identity(m, dbar)?;
            all &= s.agrees();
            detail.push(format!(
                "{} m={m} (a,b)={dbar:?}: weighted counts {} against chi {}",
                if s.agrees() { "ok  " } else { "DIFF" },
                s.counts,
                s.chi
            ));
        }
    }
    Ok((all, detail))
}

/// Runs criteria 1 to 9 in order; `seed` drives every randomized check.
pub fn run_suite(tier: Tier, seed: u64, mut progress: impl FnMut(&CheckLine)) -> Vec<CheckLine> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut push = |line: CheckLine| {
        progress(&line);
        out.push(line);
    };
    push(timed(1, "Q1 golden diagrams", criterion1));
    push(timed(2, "Q2 golden diagrams", criterion2));
    push(timed(
        3,
        "Q3 assumption failure and nilpotent repair",
        criterion3,
    ));
    push(timed(4, "oracle soundness sweep", || {
        criterion4(tier, &mut rng)
    }));
    push(timed(5, "K(2) closed forms", criterion5));
    push(timed(6, "chi(4,6) worked example", criterion6));
    push(timed(7, "route equivalence", criterion7));
    push(timed(8, "property suites", || criterion8(&mut rng)));
    let t = Instant::now();
    let (status, detail) = match criterion9() {
        Ok((ok, d)) => (Status::Soft(ok), d),
        Err(e) => (Status::Soft(false), vec![format!("error: {e}")]),
    };
    push(CheckLine {
        id: 9,
        title: "soft check: weighted counts against chi",
        status,
        detail,
        elapsed: t.elapsed(),
    });
    out
}
