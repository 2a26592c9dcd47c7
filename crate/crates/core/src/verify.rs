//! Cross-method comparison and invariant suites.
//!
//! Agreement always means equality of canonical forms. Nothing here
//! compares evaluations.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::algebra::{binomial, coeff_to_json, ExponentVec, LaurentPoly};
use crate::error::{Error, Result};
use crate::lattice::{chi_lattice, divisor_coeffs_s, lattice_points};
use crate::localization::{chi_general, chi_kernel, chi_localization_with, localize_sum, Permutation};
use crate::recursion::Recursion;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Lattice,
    Localization,
    Recursion,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Lattice, Method::Localization, Method::Recursion];

    pub fn name(self) -> &'static str {
        match self {
            Method::Lattice => "lattice",
            Method::Localization => "localization",
            Method::Recursion => "recursion",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Argument(format!("unknown method {s:?}")))
    }
}

/// Shared configuration for the three methods: the localization worker
/// count and the recursion memo.
#[derive(Debug, Default)]
pub struct Engine {
    workers: Option<usize>,
    recursion: Recursion,
}

impl Engine {
    pub fn new() -> Self {
        Self::default()
    }

    /// Runs localization sums on a dedicated pool of `workers` threads.
    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    pub fn with_recursion(mut self, recursion: Recursion) -> Self {
        self.recursion = recursion;
        self
    }

    pub fn recursion(&self) -> &Recursion {
        &self.recursion
    }

    pub fn compute(&self, method: Method, i: usize, j: usize, a: usize, n: usize) -> Result<LaurentPoly> {
        match method {
            Method::Lattice => chi_lattice(i, j, a, n),
            Method::Localization => chi_localization_with(i, j, a, n, self.workers),
            Method::Recursion => self.recursion.chi_recursive(i, j, a, n),
        }
    }

    /// Runs every selected method; errors are recorded, not returned.
    pub fn cross_check(&self, i: usize, j: usize, a: usize, n: usize, methods: &[Method]) -> ChiReport {
        assert!(!methods.is_empty(), "select at least one method");
        let outcomes = methods
            .iter()
            .map(|&method| {
                let start = Instant::now();
                let result = self.compute(method, i, j, a, n).map_err(|e| e.to_string());
                MethodOutcome {
                    method,
                    result,
                    elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
                }
            })
            .collect();
        ChiReport::new(n, a, i, j, outcomes)
    }

    /// Runs the invariant suite for every `(i, j, a)` with `n <= n_max`.
    pub fn invariant_suite(&self, opts: &SuiteOptions) -> SuiteReport {
        let mut keys = Vec::new();
        for n in 0..=opts.n_max {
            for a in 0..=n {
                for i in 1..=n + 1 {
                    for j in 1..=n + 1 {
                        keys.push((n, a, i, j));
                    }
                }
            }
        }
        let cases: Vec<CaseReport> = keys
            .par_iter()
            .map(|&(n, a, i, j)| self.check_case(opts, n, a, i, j))
            .collect();

        let mut checks = Vec::new();
        if opts.n_max >= 1 {
            checks.push(CheckReport {
                name: "projective_line".into(),
                n: 1,
                failures: p1_fixture_check()
                    .into_iter()
                    .filter(|c| !c.pass)
                    .map(|c| format!("{}: got {}, expected {}", c.name, c.got, c.expected))
                    .collect(),
            });
        }
        for n in 1..=opts.n_max {
            if n <= opts.localization_max {
                checks.push(vanishing_check(n));
                checks.push(general_symmetry_check(n));
            }
            checks.push(nested_support_check(n, 3));
        }
        SuiteReport::new(cases, checks)
    }

    fn check_case(&self, opts: &SuiteOptions, n: usize, a: usize, i: usize, j: usize) -> CaseReport {
        let methods: &[Method] = if n <= opts.localization_max {
            &Method::ALL
        } else {
            &[Method::Lattice, Method::Recursion]
        };
        let mut report = self.cross_check(i, j, a, n, methods);
        if opts.inject_fault {
            if let Some(o) = report.outcomes.iter_mut().find(|o| o.method == Method::Recursion) {
                if let Ok(p) = &mut o.result {
                    *p += &LaurentPoly::one(n + 1);
                }
            }
            report = ChiReport::new(n, a, i, j, report.outcomes);
        }
        let mut failures = report.failures();
        if let Some(chi) = report.polynomial() {
            failures.extend(case_invariants(chi, i, j, a, n));
        }
        CaseReport {
            n,
            a,
            i,
            j,
            agree: report.agree,
            eval_ones: report.eval_ones.clone(),
            binomial: report.expected_binomial.clone(),
            failures,
        }
    }
}

/// Options for [`Engine::invariant_suite`].
#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub n_max: usize,
    /// Largest dimension at which localization joins the comparison.
    pub localization_max: usize,
    /// Perturbs every recursion result; used to test that failures surface.
    pub inject_fault: bool,
}

impl SuiteOptions {
    pub fn new(n_max: usize) -> Self {
        SuiteOptions {
            n_max,
            localization_max: 4,
            inject_fault: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MethodOutcome {
    pub method: Method,
    pub result: std::result::Result<LaurentPoly, String>,
    pub elapsed_ms: f64,
}

/// Outcome of running several methods on one `(i, j, a, n)`.
#[derive(Debug, Clone)]
pub struct ChiReport {
    pub n: usize,
    pub a: usize,
    pub i: usize,
    pub j: usize,
    pub outcomes: Vec<MethodOutcome>,
    /// Every method succeeded and all results are identical.
    pub agree: bool,
    /// Value at all-ones of the common result, when there is one.
    pub eval_ones: Option<BigInt>,
    pub expected_binomial: BigInt,
}

impl ChiReport {
    fn new(n: usize, a: usize, i: usize, j: usize, outcomes: Vec<MethodOutcome>) -> Self {
        let first = outcomes[0].result.as_ref().ok();
        let agree = first.is_some() && outcomes.iter().all(|o| o.result.as_ref().ok() == first);
        let eval_ones = if agree { first.map(LaurentPoly::eval_ones) } else { None };
        ChiReport {
            n,
            a,
            i,
            j,
            outcomes,
            agree,
            eval_ones,
            expected_binomial: binomial(n, a),
        }
    }

    /// The common polynomial when all methods agree.
    pub fn polynomial(&self) -> Option<&LaurentPoly> {
        if self.agree {
            self.outcomes[0].result.as_ref().ok()
        } else {
            None
        }
    }

    pub fn result(&self, method: Method) -> Option<&LaurentPoly> {
        self.outcomes
            .iter()
            .find(|o| o.method == method)
            .and_then(|o| o.result.as_ref().ok())
    }

    /// Method errors and pairwise disagreements with the first method.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for o in &self.outcomes {
            if let Err(e) = &o.result {
                out.push(format!("{} failed: {e}", o.method));
            }
        }
        if out.is_empty() && !self.agree {
            let base = &self.outcomes[0];
            for o in &self.outcomes[1..] {
                if o.result != base.result {
                    out.push(format!("{} disagrees with {}", o.method, base.method));
                }
            }
        }
        out
    }
}

fn ser_bigint<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    coeff_to_json(v).serialize(s)
}

fn ser_opt_bigint<S: Serializer>(v: &Option<BigInt>, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.as_ref().map(coeff_to_json).serialize(s)
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseReport {
    pub n: usize,
    pub a: usize,
    pub i: usize,
    pub j: usize,
    pub agree: bool,
    #[serde(serialize_with = "ser_opt_bigint")]
    pub eval_ones: Option<BigInt>,
    #[serde(serialize_with = "ser_bigint")]
    pub binomial: BigInt,
    pub failures: Vec<String>,
}

/// A property checked once per dimension rather than per case.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub n: usize,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub cases: Vec<CaseReport>,
    pub checks: Vec<CheckReport>,
    pub summary: Summary,
}

impl SuiteReport {
    fn new(cases: Vec<CaseReport>, checks: Vec<CheckReport>) -> Self {
        let failed = cases.iter().filter(|c| !c.failures.is_empty()).count()
            + checks.iter().filter(|c| !c.failures.is_empty()).count();
        SuiteReport {
            summary: Summary {
                total: cases.len() + checks.len(),
                failed,
            },
            cases,
            checks,
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Permutations of the variables generating the stabilizer of `fixed`:
/// adjacent transpositions of the remaining indices.
fn stabilizer_generators(nvars: usize, fixed: &[usize]) -> Vec<Vec<usize>> {
    let free: Vec<usize> = (1..=nvars).filter(|h| !fixed.contains(h)).collect();
    free.windows(2)
        .map(|w| {
            let mut perm: Vec<usize> = (1..=nvars).collect();
            perm.swap(w[0] - 1, w[1] - 1);
            perm
        })
        .collect()
}

/// Per-case properties of an agreed value.
pub fn case_invariants(chi: &LaurentPoly, i: usize, j: usize, a: usize, n: usize) -> Vec<String> {
    let mut out = Vec::new();
    if !chi.is_homogeneous_of_degree(0) {
        out.push("not homogeneous of degree 0".to_string());
    }
    let ones = chi.eval_ones();
    let expected = binomial(n, a);
    if ones != expected {
        out.push(format!("value at ones {ones}, expected {expected}"));
    }
    if i != j && a >= 1 && a < n {
        let mut e = ExponentVec::zero(n + 1);
        e.as_mut_slice()[i - 1] = -1;
        e.as_mut_slice()[j - 1] = 1;
        let c = chi.coeff(&e);
        let sign = if n.is_multiple_of(2) { BigInt::one() } else { -BigInt::one() };
        if c != sign {
            out.push(format!("coefficient of t{j}/t{i} is {c}, expected {sign}"));
        }
    }
    for perm in stabilizer_generators(n + 1, &[i, j]) {
        if &chi.permute_vars(&perm) != chi {
            out.push(format!("not invariant under {perm:?}"));
            break;
        }
    }
    out
}

/// `chi_kernel(i, j, k, 0, n) = chi_kernel(i, j, 0, k, n) = 0` for
/// `1 <= k <= n`, all `i, j`.
pub fn vanishing_check(n: usize) -> CheckReport {
    let mut failures = Vec::new();
    for i in 1..=n + 1 {
        for j in 1..=n + 1 {
            for k in 1..=n {
                for (kk, ll) in [(k, 0), (0, k)] {
                    match chi_kernel(i, j, kk, ll, n) {
                        Ok(p) if p.is_zero() => {}
                        Ok(p) => failures.push(format!("kernel({i},{j},{kk},{ll}) = {p}")),
                        Err(e) => failures.push(format!("kernel({i},{j},{kk},{ll}): {e}")),
                    }
                }
            }
        }
    }
    CheckReport {
        name: "vanishing".into(),
        n,
        failures,
    }
}

/// `chi_general(n, a)` is fixed by every permutation of the variables.
pub fn general_symmetry_check(n: usize) -> CheckReport {
    let mut failures = Vec::new();
    for a in 0..=n {
        match chi_general(n, a) {
            Ok(p) => {
                for perm in stabilizer_generators(n + 1, &[]) {
                    if p.permute_vars(&perm) != p {
                        failures.push(format!("general({n},{a}) not invariant under {perm:?}"));
                    }
                }
            }
            Err(e) => failures.push(format!("general({n},{a}): {e}")),
        }
    }
    CheckReport {
        name: "general_symmetry".into(),
        n,
        failures,
    }
}

/// Lattice-point supports grow with `k` and `l`: checked for unit steps
/// `(k, l) -> (k+1, l)` and `(k, l+1)` up to `max`, all `i, j`.
pub fn nested_support_check(n: usize, max: usize) -> CheckReport {
    let mut failures = Vec::new();
    let points = |i, j, k, l| lattice_points(&divisor_coeffs_s(i, j, k, l, n).expect("valid divisor"));
    for i in 1..=n + 1 {
        for j in 1..=n + 1 {
            for k in 1..=max {
                for l in 1..=max {
                    let small = points(i, j, k, l);
                    let mut bigger = Vec::new();
                    if k < max {
                        bigger.push((k + 1, l));
                    }
                    if l < max {
                        bigger.push((k, l + 1));
                    }
                    for (k2, l2) in bigger {
                        let big = points(i, j, k2, l2);
                        if small.terms().any(|(e, _)| big.coeff(e).is_zero()) {
                            failures.push(format!("i={i} j={j}: ({k},{l}) not inside ({k2},{l2})"));
                        }
                    }
                }
            }
        }
    }
    CheckReport {
        name: "nested_supports".into(),
        n,
        failures,
    }
}

/// One labelled check of the projective-line fixtures.
#[derive(Debug, Clone, Serialize)]
pub struct FixtureCheck {
    pub name: String,
    pub expected: String,
    pub got: String,
    pub pass: bool,
}

/// Projective-line fixtures, computed by localization on `X_1 = P^1`.
/// `[O(-1)]` has fiber `t_{sigma(2)}`; `[O(-H_i)]` with the linearization
/// fixing `H_i` has fiber `t_i^{-1} t_{sigma(2)}`.
pub fn p1_fixture_check() -> Vec<FixtureCheck> {
    let nv = 2;
    let one = LaurentPoly::one(nv);
    let t = |h| LaurentPoly::var(nv, h);
    let tinv = |h| LaurentPoly::monomial(ExponentVec::from(if h == 1 { [-1, 0] } else { [0, -1] }), 1);
    let a_big = |s: &Permutation| &one - &t(s.last());
    let a_h = |h: usize, s: &Permutation| &one - &(&tinv(h) * &t(s.last()));

    let mut out = Vec::new();
    let mut record = |name: String, got: Result<LaurentPoly>, expected: LaurentPoly| {
        let (got, pass) = match got {
            Ok(p) => (p.to_string(), p == expected),
            Err(e) => (e.to_string(), false),
        };
        out.push(FixtureCheck {
            name,
            expected: expected.to_string(),
            got,
            pass,
        });
    };

    let t1t2 = &t(1) * &t(2);
    record("big torus, single factor".into(), localize_sum(a_big, 1), one.clone());
    record(
        "big torus, square".into(),
        localize_sum(|s| a_big(s).pow(2), 1),
        &one - &t1t2,
    );
    for h in 1..=2 {
        record(format!("H{h}, single factor"), localize_sum(|s| a_h(h, s), 1), one.clone());
        let expected = &one - &(&t1t2 * &tinv(h).pow(2));
        record(
            format!("H{h}, square"),
            localize_sum(|s| a_h(h, s).pow(2), 1),
            expected,
        );
    }
    record(
        "mixed H1, H2".into(),
        localize_sum(|s| &a_h(1, s) * &a_h(2, s), 1),
        LaurentPoly::zero(nv),
    );
    out
}

/// [`Engine::cross_check`] with a default engine.
pub fn cross_check(i: usize, j: usize, a: usize, n: usize, methods: &[Method]) -> ChiReport {
    Engine::new().cross_check(i, j, a, n, methods)
}

/// [`Engine::invariant_suite`] with a default engine and options.
pub fn invariant_suite(n_max: usize) -> SuiteReport {
    Engine::new().invariant_suite(&SuiteOptions::new(n_max))
}
