//! Adaptive Gauss-Kronrod quadrature with caller-supplied breakpoints.
//!
//! Globally adaptive interval subdivision: the panel with the largest
//! embedded error estimate is bisected until the summed estimate meets the
//! tolerance. Breakpoints seed the initial panel list so that known ridges
//! (Doppler-shifted plasmon resonances, window edges) start on panel
//! boundaries instead of being hunted for.
//!
//! Node/weight tables are the QUADPACK 15- and 21-point Kronrod pairs.

use alloc::vec::Vec;
use core::fmt;

/// 7-15 pair: Kronrod abscissae (positive half), Gauss weights, Kronrod weights.
const XGK15: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WG15: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
const WGK15: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// 10-21 pair.
const XGK21: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WG21: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
const WGK21: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Embedded rule order; the second order serves as an independent
/// cross-check of force integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Gk15,
    Gk21,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuadError {
    /// Tolerance not met within the panel budget; carries the worst panel.
    NonConvergence { worst_a: f64, worst_b: f64, worst_error: f64, total_error: f64 },
    BadInterval,
}

impl fmt::Display for QuadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuadError::NonConvergence { worst_a, worst_b, worst_error, total_error } => write!(
                f,
                "quadrature did not converge (total error {total_error:.3e}; \
                 worst subinterval [{worst_a:.6e}, {worst_b:.6e}] with error {worst_error:.3e})"
            ),
            QuadError::BadInterval => write!(f, "empty or non-finite integration interval"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    /// Absolute floor under which the summed error estimate is accepted
    /// regardless of the relative target.
    pub abs_tol: f64,
    pub max_panels: usize,
    pub rule: Rule,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-8, abs_tol: 0.0, max_panels: 2000, rule: Rule::Gk15 }
    }
}

/// QUADPACK-style error rescaling: sharpen the raw Gauss/Kronrod difference
/// using the deviation-from-mean integral.
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = libm::pow(200.0 * scaled / res_asc, 1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

fn kronrod_panel<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    rule: Rule,
) -> (f64, f64, u64) {
    let (xgk, wg, wgk): (&[f64], &[f64], &[f64]) = match rule {
        Rule::Gk15 => (&XGK15, &WG15, &WGK15),
        Rule::Gk21 => (&XGK21, &WG21, &WGK21),
    };
    let n = xgk.len();
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut res_gauss = 0.0;
    let mut res_kronrod = f_center * wgk[n - 1];
    let mut res_abs = res_kronrod.abs();
    if n % 2 == 0 {
        res_gauss = f_center * wg[n / 2 - 1];
    }

    let mut fv1 = [0.0f64; 11];
    let mut fv2 = [0.0f64; 11];
    for j in 0..n - 1 {
        let x = half * xgk[j];
        let v1 = f(center - x);
        let v2 = f(center + x);
        fv1[j] = v1;
        fv2[j] = v2;
        res_kronrod += wgk[j] * (v1 + v2);
        res_abs += wgk[j] * (v1.abs() + v2.abs());
        if j % 2 == 1 {
            res_gauss += wg[j / 2] * (v1 + v2);
        }
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = wgk[n - 1] * (f_center - mean).abs();
    for j in 0..n - 1 {
        res_asc += wgk[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let err = rescale_error((res_kronrod - res_gauss) * half, res_abs * half.abs(), res_asc * half.abs());
    (res_kronrod * half, err, 2 * n as u64 - 1)
}

/// Integrate `f` over `[a, b]`.
///
/// `breakpoints` inside `(a, b)` seed the initial subdivision; values
/// outside are ignored. Fails with the worst remaining subinterval when the
/// panel budget is exhausted before `sum(err) <= max(rel_tol * |I|, abs_tol)`.
pub fn integrate<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    opts: &QuadOptions,
) -> Result<QuadResult, QuadError> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(QuadError::BadInterval);
    }
    if a == b {
        return Ok(QuadResult { value: 0.0, abs_error: 0.0, evaluations: 0 });
    }

    let mut edges: Vec<f64> = Vec::with_capacity(breakpoints.len() + 2);
    edges.push(a);
    let lo = a.min(b);
    let hi = a.max(b);
    let mut inner: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|x| x.is_finite() && *x > lo && *x < hi)
        .collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    if a > b {
        inner.reverse();
    }
    edges.extend(inner);
    edges.push(b);

    struct Panel {
        a: f64,
        b: f64,
        value: f64,
        err: f64,
    }

    let mut evals = 0u64;
    let mut panels: Vec<Panel> = Vec::with_capacity(edges.len().max(16));
    for w in edges.windows(2) {
        let (value, err, ne) = kronrod_panel(f, w[0], w[1], opts.rule);
        evals += ne;
        panels.push(Panel { a: w[0], b: w[1], value, err });
    }

    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let err_sum: f64 = panels.iter().map(|p| p.err).sum();
        if err_sum <= (opts.rel_tol * total.abs()).max(opts.abs_tol) {
            return Ok(QuadResult { value: total, abs_error: err_sum, evaluations: evals });
        }
        // split the worst panel
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, _)| i)
            .unwrap();
        let Panel { a: pa, b: pb, .. } = panels[worst];
        let mid = 0.5 * (pa + pb);
        if panels.len() >= opts.max_panels || mid == pa || mid == pb {
            return Err(QuadError::NonConvergence {
                worst_a: pa,
                worst_b: pb,
                worst_error: panels[worst].err,
                total_error: err_sum,
            });
        }
        let (v1, e1, n1) = kronrod_panel(f, pa, mid, opts.rule);
        let (v2, e2, n2) = kronrod_panel(f, mid, pb, opts.rule);
        evals += n1 + n2;
        panels[worst] = Panel { a: pa, b: mid, value: v1, err: e1 };
        panels.push(Panel { a: mid, b: pb, value: v2, err: e2 });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, bp: &[f64]) -> QuadResult {
        integrate(&mut f, a, b, bp, &QuadOptions { rel_tol: 1e-12, ..Default::default() }).unwrap()
    }

    #[test]
    fn polynomial_is_exact() {
        let r = quad(|x| x * x, 0.0, 1.0, &[]);
        assert!((r.value - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn reversed_interval_flips_sign() {
        let r = quad(|x| x * x, 1.0, 0.0, &[0.3]);
        assert!((r.value + 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn gaussian_tail() {
        let r = quad(|x| libm::exp(-x * x), -20.0, 20.0, &[0.0]);
        assert!((r.value - libm::sqrt(core::f64::consts::PI)).abs() < 1e-12);
    }

    #[test]
    fn narrow_lorentzian_with_breakpoint() {
        let g = 1e-6;
        let x0 = 0.37;
        let mut evals = 0u64;
        let r = integrate(
            &mut |x: f64| g / ((x - x0) * (x - x0) + g * g),
            0.0,
            1.0,
            &[x0],
            &QuadOptions { rel_tol: 1e-10, ..Default::default() },
        )
        .unwrap();
        evals += r.evaluations;
        // arctan mass of the truncated Lorentzian
        let expect = libm::atan((1.0 - x0) / g) + libm::atan(x0 / g);
        assert!((r.value - expect).abs() < 1e-8 * expect, "value {} vs {expect}", r.value);
        assert!(evals > 0);
    }

    #[test]
    fn both_rules_agree() {
        let f = |x: f64| libm::sin(10.0 * x) / (1.0 + x * x);
        let a = integrate(&mut f.clone(), 0.0, 3.0, &[], &QuadOptions::default()).unwrap();
        let b = integrate(
            &mut f.clone(),
            0.0,
            3.0,
            &[],
            &QuadOptions { rule: Rule::Gk21, ..Default::default() },
        )
        .unwrap();
        assert!((a.value - b.value).abs() < 1e-9);
    }

    #[test]
    fn panel_budget_is_reported() {
        let r = integrate(
            &mut |x: f64| 1e-8 / (x * x + 1e-16),
            -1.0,
            1.0,
            &[],
            &QuadOptions { rel_tol: 1e-14, max_panels: 4, ..Default::default() },
        );
        match r {
            Err(QuadError::NonConvergence { worst_error, .. }) => assert!(worst_error > 0.0),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
