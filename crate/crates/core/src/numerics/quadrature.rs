//! Globally adaptive 21-point Gauss–Kronrod quadrature.
//!
//! The interval with the largest error estimate is bisected until the summed
//! error estimate falls below `max(abs_tol, rel_tol * |I|)`. Semi-infinite
//! ranges are either mapped onto `[0, 1)` with `x = a + t / (1 - t)` or
//! truncated at a cutoff beyond which the caller vouches for a power-law
//! bound on `|f|`; the bound's tail integral is added to the error estimate.

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
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
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
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

/// How an integral with an infinite upper limit is reduced to a finite one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailPolicy {
    /// Map `[a, inf)` onto `[0, 1)` via `x = a + t / (1 - t)`.
    Map,
    /// Integrate up to `cutoff` only. The caller guarantees
    /// `|f(x)| <= amplitude * x^(-exponent)` for `x >= cutoff` with `exponent > 1`.
    PowerLaw {
        cutoff: f64,
        amplitude: f64,
        exponent: f64,
    },
}

impl TailPolicy {
    /// Integral of the power-law envelope from the cutoff to infinity.
    pub fn tail_bound(&self) -> f64 {
        match *self {
            TailPolicy::Map => 0.0,
            TailPolicy::PowerLaw {
                cutoff,
                amplitude,
                exponent,
            } => amplitude.abs() * cutoff.powf(1.0 - exponent) / (exponent - 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub tail: TailPolicy,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
            tail: TailPolicy::Map,
        }
    }
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(rel_tol > 0.0) {
            return Err(Error::domain("rel_tol", rel_tol, "> 0"));
        }
        if !(abs_tol > 0.0) {
            return Err(Error::domain("abs_tol", abs_tol, "> 0"));
        }
        if max_subdivisions < 1 {
            return Err(Error::domain(
                "max_subdivisions",
                max_subdivisions as f64,
                ">= 1",
            ));
        }
        Ok(Self {
            rel_tol,
            abs_tol,
            max_subdivisions,
            tail: TailPolicy::Map,
        })
    }

    pub fn with_tail(mut self, tail: TailPolicy) -> Self {
        self.tail = tail;
        self
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    fn validate(&self) -> Result<()> {
        Self::new(self.rel_tol, self.abs_tol, self.max_subdivisions).map(|_| ())?;
        if let TailPolicy::PowerLaw {
            cutoff, exponent, ..
        } = self.tail
        {
            if !(exponent > 1.0) {
                return Err(Error::domain("tail exponent", exponent, "> 1"));
            }
            if !cutoff.is_finite() {
                return Err(Error::domain("tail cutoff", cutoff, "finite"));
            }
        }
        Ok(())
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    /// Estimated absolute error, including any analytic tail bound.
    pub error: f64,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
enum Frame {
    Direct,
    /// Segment lives in `t`, with `x = origin + t / (1 - t)`.
    Mapped {
        origin: f64,
    },
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    frame: Frame,
    value: f64,
    error: f64,
    splittable: bool,
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, frame: Frame) -> Result<(f64, f64)> {
    let eval = |x: f64| -> f64 {
        match frame {
            Frame::Direct => f(x),
            Frame::Mapped { origin } => {
                let s = 1.0 - x;
                f(origin + x / s) / (s * s)
            }
        }
    };

    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = eval(center);
    let mut res_k = f_center * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];

    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx);
        let f2 = eval(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_k * half;
    if !value.is_finite() {
        return Err(Error::domain(
            "integrand",
            value,
            "finite on the integration range",
        ));
    }
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok((value, err))
}

fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    pieces: &[(f64, f64, Frame)],
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let mut segments = Vec::with_capacity(pieces.len() + 64);
    for &(a, b, frame) in pieces {
        let (value, error) = gauss_kronrod(f, a, b, frame)?;
        segments.push(Segment {
            a,
            b,
            frame,
            value,
            error,
            splittable: true,
        });
    }

    let mut subdivisions = 0;
    loop {
        let total: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        let target = spec.abs_tol.max(spec.rel_tol * total.abs());
        if error <= target {
            return Ok(Estimate {
                value: total,
                error,
                subdivisions,
            });
        }

        let worst = segments
            .iter()
            .enumerate()
            .filter(|(_, s)| s.splittable)
            .fold(None::<(usize, f64)>, |best, (i, s)| match best {
                Some((_, e)) if e >= s.error => best,
                _ => Some((i, s.error)),
            });

        let Some((idx, _)) = worst.filter(|_| subdivisions < spec.max_subdivisions) else {
            return Err(Error::Quadrature {
                estimate: total,
                error_bound: error,
                subdivisions,
            });
        };

        let seg = segments[idx];
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            segments[idx].splittable = false;
            continue;
        }
        let (v1, e1) = gauss_kronrod(f, seg.a, mid, seg.frame)?;
        let (v2, e2) = gauss_kronrod(f, mid, seg.b, seg.frame)?;
        subdivisions += 1;
        segments[idx] = Segment {
            b: mid,
            value: v1,
            error: e1,
            ..seg
        };
        segments.push(Segment {
            a: mid,
            value: v2,
            error: e2,
            ..seg
        });
    }
}

/// Integrate `f` over `[a, b]`; `b` may be `f64::INFINITY`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    integrate_with_breaks(f, &[a, b], spec)
}

/// Integrate over `[points[0], points[n-1]]`, starting the adaptive pool from the
/// given breakpoints. Only the last point may be infinite.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    spec.validate()?;
    if points.len() < 2 {
        return Err(Error::domain(
            "breakpoint count",
            points.len() as f64,
            ">= 2",
        ));
    }
    let (last, finite) = points.split_last().expect("len >= 2");
    if let Some(bad) = finite.iter().find(|p| !p.is_finite()) {
        return Err(Error::domain(
            "integration limit",
            *bad,
            "finite (only the upper limit may be infinite)",
        ));
    }
    for w in points.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::domain(
                "integration limit",
                w[1],
                "strictly increasing",
            ));
        }
    }

    let mut pieces: Vec<(f64, f64, Frame)> = finite
        .windows(2)
        .map(|w| (w[0], w[1], Frame::Direct))
        .collect();
    let start = finite[finite.len() - 1];

    if last.is_finite() {
        pieces.push((start, *last, Frame::Direct));
        return adaptive(&f, &pieces, spec);
    }

    match spec.tail {
        TailPolicy::Map => {
            pieces.push((0.0, 1.0, Frame::Mapped { origin: start }));
            adaptive(&f, &pieces, spec)
        }
        TailPolicy::PowerLaw { cutoff, .. } => {
            if !(cutoff > start) {
                return Err(Error::domain(
                    "tail cutoff",
                    cutoff,
                    "beyond the last finite breakpoint",
                ));
            }
            pieces.push((start, cutoff, Frame::Direct));
            let mut est = adaptive(&f, &pieces, spec)?;
            est.error += spec.tail.tail_bound();
            Ok(est)
        }
    }
}
