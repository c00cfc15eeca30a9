//! Counting points of bounded anticanonical height on split toric varieties.

use num_bigint::{BigInt, BigUint};
use num_integer::{Integer, Roots};
use num_rational::{BigRational, Ratio};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fan::{validate_fan, Fan};
use crate::heights::TorusPoint;
use crate::picard::{integer_linear_form_on, PlFunction};

/// Default cap on the number of candidate points a naive scan may visit.
pub const DEFAULT_BUDGET: f64 = 5e8;

/// Completeness bounds for the naive scan.
///
/// With `E1 = max ‖e_j‖₁` and `Einf = max ‖e_j‖∞` the anticanonical function
/// satisfies `φ(n) ≥ ‖n‖₁/E1` and `φ(n) ≥ ‖n‖∞/Einf`. Summing over places,
/// a point with `H(x) ≤ B` and `M_i = max(|a_i|, b_i)` has
/// `M_i^2 ≤ B^Einf` for each `i` and `(Π M_i)^2 ≤ B^E1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBound {
    pub l1_max: u32,
    pub linf_max: u32,
    /// Bound on each `M_i`.
    pub coordinate: u64,
    /// Bound on `Π M_i`.
    #[serde(with = "crate::rational::decimal")]
    pub product: BigUint,
}

impl SearchBound {
    pub fn new(fan: &Fan, bound: u64) -> Self {
        let l1_max = fan.rays().iter().map(|e| e.iter().map(|x| x.unsigned_abs()).sum::<u64>()).max().unwrap_or(1) as u32;
        let linf_max = fan.rays().iter().flat_map(|e| e.iter().map(|x| x.unsigned_abs())).max().unwrap_or(1) as u32;
        let b = BigUint::from(bound);
        let coordinate_big = b.pow(linf_max).sqrt();
        let coordinate = u64::try_from(coordinate_big).unwrap_or(u64::MAX);
        let product = b.pow(l1_max).sqrt();
        SearchBound { l1_max, linf_max, coordinate, product }
    }

    /// Upper estimate of the number of candidates: `(2 M^2)^d`.
    pub fn estimate(&self, d: usize) -> f64 {
        (2.0 * (self.coordinate as f64).powi(2)).powi(d as i32)
    }
}

/// `±a/b` in lowest terms with `b > 0`, with `-v_p` for each prime.
#[derive(Clone, Debug)]
struct Frac {
    num: i64,
    den: i64,
    size: u64,
    /// `(p, v_p(b) - v_p(a))` over primes dividing `a·b`.
    cochar: Vec<(u64, i64)>,
}

fn smallest_prime_factors(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

fn factor_with(spf: &[u32], mut n: u64) -> Vec<(u64, i64)> {
    let mut out = Vec::new();
    while n > 1 {
        let p = spf[n as usize] as u64;
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        out.push((p, e));
    }
    out
}

fn fractions(max: u64) -> Vec<Frac> {
    let spf = smallest_prime_factors(max as usize);
    let mut out = Vec::new();
    for m in 1..=max {
        let mut pairs = Vec::new();
        for k in 1..=m {
            if k.gcd(&m) == 1 {
                pairs.push((m, k));
                if k != m {
                    pairs.push((k, m));
                }
            }
        }
        pairs.sort_unstable();
        for (a, b) in pairs {
            let mut cochar: Vec<(u64, i64)> = factor_with(&spf, b);
            cochar.extend(factor_with(&spf, a).into_iter().map(|(p, e)| (p, -e)));
            cochar.sort_unstable();
            for sign in [1i64, -1] {
                out.push(Frac { num: sign * a as i64, den: b as i64, size: m, cochar: cochar.clone() });
            }
        }
    }
    out
}

/// Exact anticanonical height with precomputed cone data.
struct HeightOracle {
    d: usize,
    /// Per maximal cone: chart rows and the integral linear form of φ.
    cones: Vec<(Vec<Vec<i64>>, Vec<i64>)>,
}

impl HeightOracle {
    fn new(fan: &Fan) -> Result<Self> {
        let phi = PlFunction::anticanonical(fan);
        let d = fan.dim();
        let cones = (0..fan.max_cones().len())
            .map(|c| {
                let chart = fan.chart(c).ok_or_else(|| Error::MalformedFan("cone is not full-dimensional".into()))?;
                let rows = (0..d).map(|j| chart.dual.row(j).to_vec()).collect();
                Ok((rows, integer_linear_form_on(fan, &phi, c)?))
            })
            .collect::<Result<_>>()?;
        Ok(HeightOracle { d, cones })
    }

    fn phi_int(&self, v: &[i64]) -> i64 {
        for (rows, m) in &self.cones {
            if rows.iter().all(|u| crate::linalg::dot(u, v) >= 0) {
                return crate::linalg::dot(m, v);
            }
        }
        unreachable!("complete fan covers every vector")
    }

    /// `Π (a_i/b_i)^{u_i}` compared with 1, for positive `a_i/b_i`.
    fn mult_ge_one(u: &[i64], xs: &[&Frac]) -> bool {
        let mut lhs: u128 = 1;
        let mut rhs: u128 = 1;
        for (&e, x) in u.iter().zip(xs) {
            let (n, d) = (x.num.unsigned_abs() as u128, x.den as u128);
            let (a, b) = if e >= 0 { (n, d) } else { (d, n) };
            for _ in 0..e.unsigned_abs() {
                match (lhs.checked_mul(a), rhs.checked_mul(b)) {
                    (Some(l), Some(r)) => {
                        lhs = l;
                        rhs = r;
                    }
                    _ => {
                        let q: Vec<Ratio<i64>> = xs.iter().map(|x| Ratio::new(x.num.abs(), x.den)).collect();
                        return crate::fan::multiplicative_sign(u, &q) != std::cmp::Ordering::Less;
                    }
                }
            }
        }
        lhs >= rhs
    }

    /// The height if it is at most `bound`.
    fn height_within(&self, xs: &[&Frac], bound: u64, w: &mut [i64], idx: &mut [usize]) -> Option<BigRational> {
        // Finite places; the running product never exceeds `bound`.
        let mut finite: u128 = 1;
        idx.fill(0);
        loop {
            let p = (0..self.d).filter_map(|i| xs[i].cochar.get(idx[i]).map(|c| c.0)).min();
            let Some(p) = p else { break };
            for i in 0..self.d {
                w[i] = 0;
                if let Some(&(q, e)) = xs[i].cochar.get(idx[i]) {
                    if q == p {
                        w[i] = e;
                        idx[i] += 1;
                    }
                }
            }
            for _ in 0..self.phi_int(w) {
                finite *= p as u128;
                if finite > bound as u128 {
                    return None;
                }
            }
        }
        // Real place: the linear form of the cone containing log|x|.
        let (_, m) = self
            .cones
            .iter()
            .find(|(rows, _)| rows.iter().all(|u| Self::mult_ge_one(u, xs)))
            .expect("complete fan covers every vector");
        let mut num = Some(finite);
        let mut den = Some(1u128);
        for (&e, x) in m.iter().zip(xs) {
            let (a, b) = (x.num.unsigned_abs() as u128, x.den as u128);
            let (a, b) = if e >= 0 { (a, b) } else { (b, a) };
            for _ in 0..e.unsigned_abs() {
                num = num.and_then(|n| n.checked_mul(a));
                den = den.and_then(|d| d.checked_mul(b));
            }
        }
        let (num, den) = match (num, den) {
            (Some(n), Some(d)) => {
                if d.checked_mul(bound as u128).is_some_and(|db| n > db) {
                    return None;
                }
                (BigUint::from(n), BigUint::from(d))
            }
            _ => {
                let mut n = BigUint::from(finite);
                let mut d = BigUint::from(1u32);
                for (&e, x) in m.iter().zip(xs) {
                    let (a, b) = (BigUint::from(x.num.unsigned_abs()), BigUint::from(x.den as u64));
                    let (a, b) = if e >= 0 { (a, b) } else { (b, a) };
                    n *= a.pow(e.unsigned_abs() as u32);
                    d *= b.pow(e.unsigned_abs() as u32);
                }
                (n, d)
            }
        };
        if num > &den * BigUint::from(bound) {
            return None;
        }
        Some(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountedPoint {
    pub point: TorusPoint,
    #[serde(with = "crate::rational")]
    pub height: BigRational,
}

fn require_split_complete(fan: &Fan) -> Result<()> {
    if !fan.is_split() {
        return Err(Error::NonSplit);
    }
    let report = validate_fan(fan);
    if !report.all_passed() {
        return Err(Error::InvalidArgument("fan is not complete and regular".into()));
    }
    Ok(())
}

/// Every point of `(Q^*)^d` with anticanonical height at most `bound`, in a
/// deterministic order (lexicographic in the scan order of fractions).
pub fn enumerate_naive(fan: &Fan, bound: u64, budget: f64, exec: Execution) -> Result<Vec<CountedPoint>> {
    require_split_complete(fan)?;
    if bound < 1 {
        return Ok(Vec::new());
    }
    let sb = SearchBound::new(fan, bound);
    let estimate = sb.estimate(fan.dim());
    if estimate > budget {
        return Err(Error::BudgetExceeded { estimate, budget });
    }
    let oracle = HeightOracle::new(fan)?;
    let fracs = fractions(sb.coordinate);
    let d = fan.dim();
    // Products of sizes never exceed M^d < u128::MAX within the budget.
    let product_cap = u128::try_from(&sb.product).unwrap_or(u128::MAX);
    let chunks = exec.map(&fracs, |first| {
        let mut scan = Scan { oracle: &oracle, fracs: &fracs, bound, d, product_cap, w: vec![0; d], idx: vec![0; d], out: Vec::new() };
        let mut stack: Vec<&Frac> = vec![first];
        scan.run(&mut stack, first.size as u128);
        scan.out
    });
    Ok(chunks.into_iter().flatten().collect())
}

struct Scan<'a> {
    oracle: &'a HeightOracle,
    fracs: &'a [Frac],
    bound: u64,
    d: usize,
    product_cap: u128,
    w: Vec<i64>,
    idx: Vec<usize>,
    out: Vec<CountedPoint>,
}

impl<'a> Scan<'a> {
    fn run(&mut self, stack: &mut Vec<&'a Frac>, product: u128) {
        if product > self.product_cap {
            return;
        }
        if stack.len() == self.d {
            if let Some(height) = self.oracle.height_within(stack, self.bound, &mut self.w, &mut self.idx) {
                let coords = stack.iter().map(|f| Ratio::new(f.num, f.den)).collect();
                self.out.push(CountedPoint { point: TorusPoint::new(coords).expect("nonzero"), height });
            }
            return;
        }
        let fracs = self.fracs;
        for f in fracs {
            let p = product.saturating_mul(f.size as u128);
            if p > self.product_cap {
                // Fractions are sorted by size.
                break;
            }
            stack.push(f);
            self.run(stack, p);
            stack.pop();
        }
    }
}

/// Fans with a closed-form counting routine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Registered {
    ProjectiveLine,
    ProjectivePlane,
    ProductOfLines,
}

impl Registered {
    pub fn fan(self) -> Fan {
        match self {
            Registered::ProjectiveLine => {
                Fan::new(1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]], vec![]).unwrap()
            }
            Registered::ProjectivePlane => Fan::new(
                2,
                vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
                vec![vec![0, 1], vec![1, 2], vec![0, 2]],
                vec![],
            )
            .unwrap(),
            Registered::ProductOfLines => Fan::new(
                2,
                vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]],
                vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
                vec![],
            )
            .unwrap(),
        }
    }

    /// Recognizes a registered fan up to relabelling of rays and cones.
    pub fn recognize(fan: &Fan) -> Option<Registered> {
        if !fan.is_split() {
            return None;
        }
        let key = |f: &Fan| {
            let mut cones: Vec<Vec<Vec<i64>>> = f
                .max_cones()
                .iter()
                .map(|c| {
                    let mut v: Vec<Vec<i64>> = c.iter().map(|&i| f.rays()[i].clone()).collect();
                    v.sort();
                    v
                })
                .collect();
            cones.sort();
            (f.dim(), cones)
        };
        let k = key(fan);
        [Registered::ProjectiveLine, Registered::ProjectivePlane, Registered::ProductOfLines]
            .into_iter()
            .find(|r| key(&r.fan()) == k)
    }
}

fn totients(n: usize) -> Vec<u64> {
    let mut phi: Vec<u64> = (0..=n as u64).collect();
    for i in 2..=n {
        if phi[i] == i as u64 {
            let mut j = i;
            while j <= n {
                phi[j] -= phi[j] / i as u64;
                j += i;
            }
        }
    }
    phi
}

fn mobius(n: usize) -> Vec<i8> {
    let mut mu = vec![1i8; n + 1];
    let mut is_composite = vec![false; n + 1];
    for p in 2..=n {
        if !is_composite[p] {
            let mut j = p;
            while j <= n {
                if j > p {
                    is_composite[j] = true;
                }
                mu[j] = -mu[j];
                j += p;
            }
            let sq = p * p;
            let mut j = sq;
            while j <= n {
                mu[j] = 0;
                j += sq;
            }
        }
    }
    if n >= 1 {
        mu[1] = 1;
    }
    mu
}

/// Number of torus points of height `max(|a|,|b|)` exactly `m` on the line.
fn line_multiplicities(s: usize) -> Vec<u64> {
    let phi = totients(s);
    (0..=s).map(|m| if m == 0 { 0 } else if m == 1 { 2 } else { 4 * phi[m] }).collect()
}

/// `N(B)` by a closed-form parametrization of the registered fan.
pub fn enumerate_specialized(fan: &Fan, bound: u64) -> Result<u64> {
    let reg = Registered::recognize(fan).ok_or(Error::UnregisteredFan)?;
    Ok(count_registered(reg, bound))
}

pub fn count_registered(reg: Registered, bound: u64) -> u64 {
    if bound < 1 {
        return 0;
    }
    match reg {
        // H(±a/b) = max(a,b)^2: coprime pairs in [1,S]^2, both signs.
        Registered::ProjectiveLine => {
            let s = bound.sqrt() as usize;
            line_multiplicities(s).iter().sum()
        }
        // Primitive triples with nonzero entries and max ≤ T, up to sign.
        Registered::ProjectivePlane => {
            let t = bound.cbrt() as usize;
            let mu = mobius(t);
            let total: i128 = (1..=t)
                .map(|d| {
                    let c = 2 * (t / d) as i128;
                    mu[d] as i128 * c * c * c
                })
                .sum();
            (total / 2) as u64
        }
        // Pairs with max(a1,b1)·max(a2,b2) ≤ S.
        Registered::ProductOfLines => {
            let s = bound.sqrt() as usize;
            let mult = line_multiplicities(s);
            let mut cumulative = vec![0u64; s + 1];
            for m in 1..=s {
                cumulative[m] = cumulative[m - 1] + mult[m];
            }
            (1..=s).map(|n| mult[n] * cumulative[s / n]).sum()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Naive,
    Specialized,
    /// Specialized when the fan is registered, naive otherwise.
    Auto,
}

pub fn count(fan: &Fan, bound: u64, strategy: Strategy, budget: f64, exec: Execution) -> Result<u64> {
    match strategy {
        Strategy::Naive => Ok(enumerate_naive(fan, bound, budget, exec)?.len() as u64),
        Strategy::Specialized => enumerate_specialized(fan, bound),
        Strategy::Auto => match enumerate_specialized(fan, bound) {
            Err(Error::UnregisteredFan) => count(fan, bound, Strategy::Naive, budget, exec),
            r => r,
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountRow {
    #[serde(rename = "B")]
    pub bound: u64,
    #[serde(rename = "N")]
    pub count: u64,
    pub predicted: f64,
    pub ratio: f64,
}

/// Least-squares fit of `N/B ≈ a (log B)^{k-1}/(k-1)! + b (log B)^{k-2}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub leading: f64,
    pub leading_stderr: f64,
    pub secondary: f64,
    pub secondary_stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub fan: String,
    pub strategy: Strategy,
    pub k: usize,
    pub theta: Interval,
    pub rows: Vec<CountRow>,
    pub fit: Option<Fit>,
}

impl CountReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("B,N,predicted,ratio\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{},{}\n", r.bound, r.count, r.predicted, r.ratio));
        }
        s
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Main term `Θ/(k-1)! · B (log B)^{k-1}`.
pub fn predicted(theta: f64, k: usize, bound: u64) -> f64 {
    let b = bound as f64;
    theta / factorial(k - 1) * b * b.ln().powi(k as i32 - 1)
}

/// Compares counts with the predicted main term; fits a two-term model for
/// `k ≥ 2`, which needs at least four bounds spanning two decades.
pub fn asymptotic_report(
    fan_name: &str,
    strategy: Strategy,
    k: usize,
    theta: Interval,
    counts: &[(u64, u64)],
) -> Result<CountReport> {
    if k == 0 {
        return Err(Error::InvalidArgument("Picard rank must be positive".into()));
    }
    if counts.is_empty() {
        return Err(Error::InsufficientSchedule("no bounds".into()));
    }
    let rows: Vec<CountRow> = counts
        .iter()
        .map(|&(b, n)| {
            let p = predicted(theta.center(), k, b);
            CountRow { bound: b, count: n, predicted: p, ratio: n as f64 / p }
        })
        .collect();
    let fit = if k >= 2 {
        let lo = counts.iter().map(|c| c.0).min().unwrap() as f64;
        let hi = counts.iter().map(|c| c.0).max().unwrap() as f64;
        if counts.len() < 4 || hi / lo < 100.0 {
            return Err(Error::InsufficientSchedule(format!(
                "{} bounds spanning a factor {:.1}; need 4 spanning 100",
                counts.len(),
                hi / lo
            )));
        }
        Some(two_term_fit(k, counts))
    } else {
        None
    };
    Ok(CountReport { fan: fan_name.to_string(), strategy, k, theta, rows, fit })
}

fn two_term_fit(k: usize, counts: &[(u64, u64)]) -> Fit {
    let kf = factorial(k - 1);
    let xs: Vec<(f64, f64, f64)> = counts
        .iter()
        .map(|&(b, n)| {
            let l = (b as f64).ln();
            (l.powi(k as i32 - 1) / kf, l.powi(k as i32 - 2), n as f64 / b as f64)
        })
        .collect();
    let (mut s11, mut s12, mut s22, mut t1, mut t2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(x1, x2, y) in &xs {
        s11 += x1 * x1;
        s12 += x1 * x2;
        s22 += x2 * x2;
        t1 += x1 * y;
        t2 += x2 * y;
    }
    let det = s11 * s22 - s12 * s12;
    let a = (s22 * t1 - s12 * t2) / det;
    let b = (s11 * t2 - s12 * t1) / det;
    let rss: f64 = xs.iter().map(|&(x1, x2, y)| (y - a * x1 - b * x2).powi(2)).sum();
    let sigma2 = rss / (xs.len() as f64 - 2.0);
    Fit {
        leading: a,
        leading_stderr: (sigma2 * s22 / det).sqrt(),
        secondary: b,
        secondary_stderr: (sigma2 * s11 / det).sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p1_small_bounds() {
        let f = Registered::ProjectiveLine.fan();
        let pts = enumerate_naive(&f, 4, DEFAULT_BUDGET, Execution::Sequential).unwrap();
        let mut xs: Vec<Ratio<i64>> = pts.iter().map(|p| p.point.coords()[0]).collect();
        xs.sort();
        let expected: Vec<Ratio<i64>> =
            [(-2, 1), (-1, 1), (-1, 2), (1, 2), (1, 1), (2, 1)].iter().map(|&(a, b)| Ratio::new(a, b)).collect();
        assert_eq!(xs, expected);
        assert_eq!(enumerate_naive(&f, 1, DEFAULT_BUDGET, Execution::Sequential).unwrap().len(), 2);
        assert!(enumerate_naive(&f, 0, DEFAULT_BUDGET, Execution::Sequential).unwrap().is_empty());
    }

    #[test]
    fn budget_refusal() {
        let f = Registered::ProjectivePlane.fan();
        let err = enumerate_naive(&f, 1_000_000_000_000, DEFAULT_BUDGET, Execution::Sequential).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn p2_hand_count() {
        // Nonzero primitive triples with entries in {±1, ±2}, up to sign:
        // all 64 sign/size patterns minus the 8 with every entry ±2, halved.
        assert_eq!(count_registered(Registered::ProjectivePlane, 8), 28);
        let f = Registered::ProjectivePlane.fan();
        assert_eq!(enumerate_naive(&f, 8, DEFAULT_BUDGET, Execution::Sequential).unwrap().len(), 28);
    }

    #[test]
    fn recognition_ignores_labels() {
        let f = Fan::new(1, vec![vec![-1], vec![1]], vec![vec![1], vec![0]], vec![]).unwrap();
        assert_eq!(Registered::recognize(&f), Some(Registered::ProjectiveLine));
        let g = Fan::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, 1], vec![0, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
            vec![],
        )
        .unwrap();
        assert_eq!(enumerate_specialized(&g, 10).unwrap_err(), Error::UnregisteredFan);
    }

    #[test]
    fn mobius_values() {
        assert_eq!(mobius(12)[1..].to_vec(), vec![1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]);
    }

    #[test]
    fn schedule_checks() {
        let theta = Interval { lo: 1.0, hi: 1.0 };
        assert!(asymptotic_report("x", Strategy::Naive, 2, theta, &[(10, 1), (100, 5), (1000, 40)]).is_err());
        assert!(asymptotic_report("x", Strategy::Naive, 1, theta, &[(10, 1)]).is_ok());
    }

    #[test]
    fn exact_fit_recovers_coefficients() {
        let counts: Vec<(u64, u64)> = [1e4, 1e5, 1e6, 1e7]
            .iter()
            .map(|&b: &f64| (b as u64, (b * (2.0 * b.ln() + 3.0)).round() as u64))
            .collect();
        let r = asymptotic_report("x", Strategy::Naive, 2, Interval { lo: 2.0, hi: 2.0 }, &counts).unwrap();
        let fit = r.fit.unwrap();
        // Rounding the counts to integers perturbs N/B by up to 5e-5.
        assert!((fit.leading - 2.0).abs() < 1e-4 && (fit.secondary - 3.0).abs() < 1e-3, "{fit:?}");
        assert!((fit.leading - 2.0).abs() < 4.0 * fit.leading_stderr, "{fit:?}");
    }
}
