//! Fixed-order quadrature rules.

/// Nodes of the 8-point Gauss–Legendre rule on `[-1, 1]`.
const GL8_X: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];

const GL8_W: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

/// Gauss–Legendre nodes and weights mapped onto `[a, b]`.
#[inline]
pub fn gauss8(a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    GL8_X
        .iter()
        .zip(GL8_W.iter())
        .map(move |(&x, &w)| (mid + half * x, half * w))
}

/// Integrate `f` over `[a, b]` with the 8-point rule on `pieces` equal panels.
pub fn gauss_legendre<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, pieces: usize) -> f64 {
    let pieces = pieces.max(1);
    let h = (b - a) / pieces as f64;
    let mut acc = 0.0;
    for k in 0..pieces {
        let lo = a + h * k as f64;
        let hi = if k + 1 == pieces { b } else { lo + h };
        for (x, w) in gauss8(lo, hi) {
            acc += w * f(x);
        }
    }
    acc
}

/// Composite Simpson rule with `n` (rounded up to even) panels.
pub fn simpson<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = (n.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        let x = a + h * k as f64;
        acc += if k % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    acc * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_exact_for_degree_15() {
        let f = |x: f64| x.powi(15) + 3.0 * x.powi(14) - x;
        let exact = 3.0 / 15.0 * (2f64.powi(15) - 1.0) + (2f64.powi(16) - 1.0) / 16.0 - 1.5;
        let got = gauss_legendre(f, 1.0, 2.0, 1);
        assert!((got - exact).abs() < 1e-9 * exact.abs(), "{got} vs {exact}");
    }

    #[test]
    fn simpson_sine() {
        let got = simpson(f64::sin, 0.0, std::f64::consts::PI, 200);
        assert!((got - 2.0).abs() < 1e-8);
    }
}
