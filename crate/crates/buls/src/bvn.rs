//! Bivariate standard normal CDF (Genz's adaptation of Drezner–Wesolowsky).

use std::f64::consts::PI;

use crate::quadrature::gauss_legendre;
use crate::specialfn::normal_cdf;

/// P(X ≤ x, Y ≤ y) for standard normals with correlation `r`.
pub fn bvn_cdf(x: f64, y: f64, r: f64) -> f64 {
    if x == f64::NEG_INFINITY || y == f64::NEG_INFINITY {
        return 0.0;
    }
    if x == f64::INFINITY {
        return normal_cdf(y);
    }
    if y == f64::INFINITY {
        return normal_cdf(x);
    }
    bvn_upper(-x, -y, r).clamp(0.0, 1.0)
}

/// P(X > h, Y > k).
fn bvn_upper(h: f64, k: f64, r: f64) -> f64 {
    let n = if r.abs() < 0.3 {
        6
    } else if r.abs() < 0.75 {
        12
    } else {
        20
    };
    let (xs, ws) = gauss_legendre(n);
    let mut hk = h * k;
    let mut bvn = 0.0;
    if r.abs() < 0.925 {
        let hs = 0.5 * (h * h + k * k);
        let asr = r.asin();
        for (x, w) in xs.iter().zip(&ws) {
            let sn = (0.5 * asr * (x + 1.0)).sin();
            bvn += 0.5 * w * ((sn * hk - hs) / (1.0 - sn * sn)).exp();
        }
        return bvn * asr / (2.0 * PI) + normal_cdf(-h) * normal_cdf(-k);
    }
    let mut k = k;
    if r < 0.0 {
        k = -k;
        hk = -hk;
    }
    if r.abs() < 1.0 {
        let as_ = (1.0 - r) * (1.0 + r);
        let mut a = as_.sqrt();
        let bs = (h - k) * (h - k);
        let c = (4.0 - hk) / 8.0;
        let d = (12.0 - hk) / 16.0;
        bvn = a * (-0.5 * (bs / as_ + hk)).exp() * (1.0 - c * (bs - as_) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as_ * as_ / 5.0);
        if hk > -160.0 {
            let b = bs.sqrt();
            bvn -= (-0.5 * hk).exp() * (2.0 * PI).sqrt() * normal_cdf(-b / a) * b * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
        }
        a *= 0.5;
        for (x, w) in xs.iter().zip(&ws) {
            let xs2 = (a * (x + 1.0)).powi(2);
            let rs = (1.0 - xs2).sqrt();
            bvn += a
                * w
                * ((-bs / (2.0 * xs2) - hk / (1.0 + rs)).exp() / rs
                    - (-0.5 * (bs / xs2 + hk)).exp() * (1.0 + c * xs2 * (1.0 + d * xs2)));
        }
        bvn = -bvn / (2.0 * PI);
    }
    if r > 0.0 {
        bvn + normal_cdf(-h.max(k))
    } else {
        let mut out = -bvn;
        if k > h {
            out += if h < 0.0 { normal_cdf(k) - normal_cdf(h) } else { normal_cdf(-h) - normal_cdf(-k) };
        }
        out
    }
}
