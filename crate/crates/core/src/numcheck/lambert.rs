use super::NumError;

const BRANCH_POINT: f64 = -1.0 / std::f64::consts::E;

/// Principal branch of the Lambert W function by Halley iteration.
pub fn lambert_w0(x: f64) -> Result<f64, NumError> {
    if x < BRANCH_POINT {
        return Err(NumError::Domain(format!("lambertw of {x} below -1/e")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == BRANCH_POINT {
        return Ok(-1.0);
    }
    let mut w = if x < -0.25 {
        // series about the branch point
        let p = (2.0 * (std::f64::consts::E * x + 1.0)).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x < 1.0 {
        x - x * x
    } else {
        let l = x.ln();
        l - l.ln().max(0.0)
    };
    for _ in 0..100 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        w -= step;
        if step.abs() <= 1e-15 * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defining_identity() {
        for x in [0.5, 1.0, 2.0, -0.2, 10.0, 1e-8, -0.36] {
            let w = lambert_w0(x).unwrap();
            assert!((w * w.exp() - x).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn omega_constant() {
        assert!((lambert_w0(1.0).unwrap() - 0.567_143_290_409_783_8).abs() < 1e-15);
    }

    #[test]
    fn below_branch_point_is_rejected() {
        assert!(lambert_w0(-0.5).is_err());
    }
}
