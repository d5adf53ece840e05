//! Quadrature rules and deterministic summation.

use std::ops::Add;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Leaf size below which [`pairwise_sum_by`] adds sequentially.
const PAIRWISE_BLOCK: usize = 16;

/// Sums `f(0) + f(1) + … + f(n-1)` with a fixed binary tree.
///
/// The association order depends only on `n`, so the result is reproducible
/// regardless of how callers schedule the surrounding work.
pub fn pairwise_sum_by<S, F>(n: usize, f: &F) -> S
where
    S: Copy + Zero + Add<Output = S>,
    F: Fn(usize) -> S,
{
    fn rec<S, F>(lo: usize, hi: usize, f: &F) -> S
    where
        S: Copy + Zero + Add<Output = S>,
        F: Fn(usize) -> S,
    {
        if hi - lo <= PAIRWISE_BLOCK {
            let mut acc = S::zero();
            for i in lo..hi {
                acc = acc + f(i);
            }
            acc
        } else {
            let mid = lo + (hi - lo) / 2;
            rec(lo, mid, f) + rec(mid, hi, f)
        }
    }
    rec(0, n, f)
}

pub fn pairwise_sum<S>(values: &[S]) -> S
where
    S: Copy + Zero + Add<Output = S>,
{
    pairwise_sum_by(values.len(), &|i| values[i])
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre order must be positive");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    for i in 0..m {
        // Tricomi's initial guess, refined by Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped onto `[a, b]`.
pub fn gauss_legendre_on<T: Real>(n: usize, a: T, b: T) -> (Vec<T>, Vec<T>) {
    let (x, w) = gauss_legendre(n);
    let half = (b - a) / T::lit(2.0);
    let mid = (a + b) / T::lit(2.0);
    (
        x.iter().map(|&xi| mid + half * T::lit(xi)).collect(),
        w.iter().map(|&wi| half * T::lit(wi)).collect(),
    )
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T) {
    let half = (b - a) / T::lit(2.0);
    let mid = (a + b) / T::lit(2.0);
    let fc = f(mid);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let pair = f(mid - dx) + f(mid + dx);
        kronrod = kronrod + pair * T::lit(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + pair * T::lit(WG[j / 2]);
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Globally adaptive Gauss–Kronrod (7/15) integration of `f` over `[a, b]`.
///
/// `breakpoints` inside the interval are used as initial subdivision points,
/// which is how callers flag kinks in an otherwise smooth integrand.
pub fn integrate_adaptive<T: Real, F: Fn(T) -> T>(
    f: &F,
    a: T,
    b: T,
    breakpoints: &[T],
    rel_tol: T,
    abs_tol: T,
    max_intervals: usize,
) -> Result<T> {
    if a == b {
        return Ok(T::zero());
    }
    let (lo, hi, sign) = if a < b { (a, b, T::one()) } else { (b, a, -T::one()) };
    let mut cuts: Vec<T> = breakpoints.iter().copied().filter(|&p| p > lo && p < hi).collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(lo);
    edges.extend(cuts);
    edges.push(hi);

    let mut intervals: Vec<(T, T, T, T)> = edges
        .windows(2)
        .map(|w| {
            let (v, e) = gk15(f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();

    loop {
        let total: T = intervals.iter().map(|iv| iv.2).sum();
        let err: T = intervals.iter().map(|iv| iv.3).sum();
        if !total.is_finite() || !err.is_finite() {
            return Err(Error::Numerical("non-finite value in adaptive quadrature".into()));
        }
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(sign * total);
        }
        if intervals.len() >= max_intervals {
            return Err(Error::Numerical(format!(
                "adaptive quadrature did not reach tolerance within {max_intervals} subintervals \
                 (estimate {total}, error {err})"
            )));
        }
        let (worst, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).expect("finite error estimates"))
            .expect("at least one interval");
        let (a0, b0, _, _) = intervals.swap_remove(worst);
        let m = (a0 + b0) / T::lit(2.0);
        if m <= a0 || m >= b0 {
            return Err(Error::Numerical("adaptive quadrature interval underflow".into()));
        }
        let (v1, e1) = gk15(f, a0, m);
        let (v2, e2) = gk15(f, m, b0);
        intervals.push((a0, m, v1, e1));
        intervals.push((m, b0, v2, e2));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 16, 33, 64] {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let approx: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((approx - exact).abs() < 1e-13, "n={n} deg={deg}: {approx} vs {exact}");
            }
        }
    }

    #[test]
    fn legendre_nodes_are_symmetric_and_sorted() {
        let (x, w) = gauss_legendre(32);
        for i in 0..32 {
            assert_eq!(x[i], -x[31 - i]);
            assert_eq!(w[i], w[31 - i]);
        }
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn adaptive_handles_log_singular_and_kinked_integrands() {
        let v = integrate_adaptive(&|x: f64| x.ln(), 1e-6, 1.0, &[], 1e-12, 0.0, 500).unwrap();
        let exact = -1.0 - (1e-6 * (1e-6f64).ln() - 1e-6);
        assert!((v - exact).abs() < 1e-11);

        let kink = |x: f64| (x - 0.3).abs();
        let v = integrate_adaptive(&kink, 0.0, 1.0, &[0.3], 1e-13, 0.0, 50).unwrap();
        assert!((v - (0.045 + 0.245)).abs() < 1e-14);
        let rev = integrate_adaptive(&kink, 1.0, 0.0, &[0.3], 1e-13, 0.0, 50).unwrap();
        assert_eq!(rev, -v);
    }

    #[test]
    fn pairwise_sum_matches_naive_for_exact_inputs() {
        let v: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 499_500.0);
        assert_eq!(pairwise_sum::<f64>(&[]), 0.0);
    }
}
