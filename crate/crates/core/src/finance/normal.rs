//! Standard normal distribution helpers.

// Quantile coefficients are kept digit for digit as published.
#![allow(clippy::excessive_precision)]

use libm::erfc;

use crate::error::{Error, Result};

/// Smallest and largest uniform fed to the quantile when mapping points.
pub const U_MIN: f64 = 1.0 / 4_294_967_296.0;
pub const U_MAX: f64 = 1.0 - U_MIN;

/// Standard normal quantile for `u` strictly inside (0, 1).
pub fn inv_norm_cdf(u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::invalid(format!(
            "normal quantile needs 0 < u < 1, got {u}"
        )));
    }
    Ok(ppnd16(u))
}

/// Quantile after clamping `u` into `[2^-32, 1 - 2^-32]`.
#[inline]
pub fn clamped_quantile(u: f64) -> f64 {
    ppnd16(u.clamp(U_MIN, U_MAX))
}

/// Standard normal CDF.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

// Wichura's AS 241 (PPND16), relative accuracy about 1e-16.
#[inline]
fn ppnd16(p: f64) -> f64 {
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q * poly(&A, r) / poly(&B, r);
    }
    let r = if q < 0.0 { p } else { 1.0 - p };
    let r = (-r.ln()).sqrt();
    let val = if r <= 5.0 {
        let r = r - 1.6;
        poly(&C, r) / poly(&D, r)
    } else {
        let r = r - 5.0;
        poly(&E, r) / poly(&F, r)
    };
    if q < 0.0 {
        -val
    } else {
        val
    }
}

#[inline]
fn poly(c: &[f64; 8], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

const A: [f64; 8] = [
    3.387_132_872_796_366_608,
    1.331_416_678_917_843_774_5e2,
    1.971_590_950_306_551_442_7e3,
    1.373_169_376_550_946_112_5e4,
    4.592_195_393_154_987_145_7e4,
    6.726_577_092_700_870_085_3e4,
    3.343_057_558_358_812_810_5e4,
    2.509_080_928_730_122_672_7e3,
];
const B: [f64; 8] = [
    1.0,
    4.231_333_070_160_091_125_2e1,
    6.871_870_074_920_579_083e2,
    5.394_196_021_424_751_107_7e3,
    2.121_379_430_158_659_586_7e4,
    3.930_789_580_009_271_061e4,
    2.872_908_573_572_194_267_4e4,
    5.226_495_278_852_854_561e3,
];
const C: [f64; 8] = [
    1.423_437_110_749_683_577_34,
    4.630_337_846_156_545_295_9,
    5.769_497_221_460_691_405_5,
    3.647_848_324_763_204_605_04,
    1.270_458_252_452_368_382_58,
    2.417_807_251_774_506_117_7e-1,
    2.272_384_498_926_918_458_33e-2,
    7.745_450_142_783_414_076_4e-4,
];
const D: [f64; 8] = [
    1.0,
    2.053_191_626_637_758_821_87,
    1.676_384_830_183_803_849_4,
    6.897_673_349_851_000_045_5e-1,
    1.481_039_764_274_800_745_9e-1,
    1.519_866_656_361_645_719_66e-2,
    5.475_938_084_995_344_946e-4,
    1.050_750_071_644_416_843_24e-9,
];
const E: [f64; 8] = [
    6.657_904_643_501_103_777_2,
    5.463_784_911_164_114_369_9,
    1.784_826_539_917_291_335_8,
    2.965_605_718_285_048_912_3e-1,
    2.653_218_952_657_612_309_3e-2,
    1.242_660_947_388_078_438_6e-3,
    2.711_555_568_743_487_578_15e-5,
    2.010_334_399_292_288_132_65e-7,
];
const F: [f64; 8] = [
    1.0,
    5.998_322_065_558_879_376_9e-1,
    1.369_298_809_227_358_053_1e-1,
    1.487_536_129_085_061_485_25e-2,
    7.868_691_311_456_132_591e-4,
    1.846_318_317_510_054_681_8e-5,
    1.421_511_758_316_445_888_7e-7,
    2.044_263_103_389_939_785_64e-15,
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_quantiles() {
        assert_eq!(inv_norm_cdf(0.5).unwrap(), 0.0);
        assert!((inv_norm_cdf(0.975).unwrap() - 1.959_963_984_540_054).abs() < 1e-13);
        assert!((inv_norm_cdf(0.025).unwrap() + 1.959_963_984_540_054).abs() < 1e-13);
        // Far tail, past the second rational branch.
        assert!((inv_norm_cdf(1e-12).unwrap() + 7.034_483_825_301_131).abs() < 1e-9);
    }

    #[test]
    fn matches_high_precision_quantiles() {
        // Reference values from 30-digit arithmetic via sqrt(2) * erfinv(2u - 1).
        let cases = [
            (0.0005, -3.290_526_731_491_894_787_4),
            (0.02, -2.053_748_910_631_823_044_3),
            (0.3, -0.524_400_512_708_040_815_97),
            (1e-9, -5.997_807_015_007_686_861_4),
        ];
        for (u, z) in cases {
            let got = inv_norm_cdf(u).unwrap();
            assert!((got - z).abs() < 1e-13, "{u}: {got} vs {z}");
        }
    }

    #[test]
    fn endpoints_are_rejected() {
        assert!(inv_norm_cdf(0.0).is_err());
        assert!(inv_norm_cdf(1.0).is_err());
        assert!(inv_norm_cdf(f64::NAN).is_err());
        assert!(clamped_quantile(0.0).is_finite());
        assert!(clamped_quantile(1.0).is_finite());
    }

    #[test]
    fn symmetric_and_inverts_cdf() {
        for i in 1..2000 {
            let u = i as f64 / 2000.0;
            let z = inv_norm_cdf(u).unwrap();
            assert!((z + inv_norm_cdf(1.0 - u).unwrap()).abs() < 1e-12);
            assert!((norm_cdf(z) - u).abs() < 1e-14 * u.min(1.0 - u).max(0.01));
        }
    }
}
