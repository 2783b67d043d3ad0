//! Control functions and constants assembled from other control functions.

use super::control::ControlFunction;
use crate::error::{Error, Result};
use crate::real::Real;

/// `t ↦ 1 / θ₀⁻¹(1/t)`.
fn reciprocal_theta0_inverse<T: Real>() -> ControlFunction<T> {
    ControlFunction::Theta0.inverse().reciprocal()
}

/// `λ = max{6, 2η(2), 2/η⁻¹(1/6)}`.
pub fn lambda_from_eta<T: Real>(eta: &ControlFunction<T>) -> Result<T> {
    let two = T::lit(2.0);
    let a = two * eta.eval(two)?;
    let b = two / eta.clone().inverse().eval(T::one() / T::lit(6.0))?;
    Ok(T::lit(6.0).max(a).max(b))
}

/// `θ′(t) = θ₀(θ(1 / θ₀⁻¹(1/t)))`.
pub fn theta_prime<T: Real>(theta: &ControlFunction<T>) -> ControlFunction<T> {
    ControlFunction::Composed(vec![ControlFunction::Theta0, theta.clone(), reciprocal_theta0_inverse()])
}

/// `η(t) = 3λ θ′(3λ t)`.
pub fn eta_from_theta_lambda<T: Real>(theta: &ControlFunction<T>, lambda: T) -> Result<ControlFunction<T>> {
    if !(lambda >= T::one()) || !lambda.is_finite() {
        return Err(Error::Argument(format!("λ must be at least 1, got {lambda}")));
    }
    let s = ControlFunction::LinearScale(T::lit(3.0) * lambda);
    Ok(ControlFunction::Composed(vec![s.clone(), theta_prime(theta), s]))
}

/// `θ(t) = 1 / θ₀⁻¹(1 / η(θ₀(t)))`.
pub fn theta_from_eta<T: Real>(eta: &ControlFunction<T>) -> ControlFunction<T> {
    ControlFunction::Composed(vec![reciprocal_theta0_inverse(), eta.clone(), ControlFunction::Theta0])
}

/// `M₁ = 6 L θ₁(4C)`.
pub fn m1_bound<T: Real>(l: T, c: T, theta1: &ControlFunction<T>) -> Result<T> {
    Ok(T::lit(6.0) * l * theta1.eval(T::lit(4.0) * c)?)
}

/// `M₂ = (2L + 6Lθ₁(4C)) ∨ (2L + 6Lθ₁′(4CL²))` with `θ₁′(t) = 1/θ₁⁻¹(1/t)`.
pub fn m2_bound<T: Real>(l: T, c: T, theta1: &ControlFunction<T>) -> Result<T> {
    let two_l = T::lit(2.0) * l;
    let six_l = T::lit(6.0) * l;
    let direct = two_l + six_l * theta1.eval(T::lit(4.0) * c)?;
    let inverse_side = theta1.clone().inverse().reciprocal();
    let reverse = two_l + six_l * inverse_side.eval(T::lit(4.0) * c * l * l)?;
    Ok(direct.max(reverse))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Closed-form inverse of `θ₀`, independent of the bisection.
    fn theta0_inv(s: f64) -> f64 {
        if s >= 3.0 {
            s / 3.0
        } else {
            (s / 3.0) * (s / 3.0)
        }
    }

    fn theta0(t: f64) -> f64 {
        3.0 * t.max(t.sqrt())
    }

    #[test]
    fn lambda_examples() {
        let id = ControlFunction::<f64>::identity();
        assert_eq!(lambda_from_eta(&id).unwrap(), 12.0);
        assert_eq!(lambda_from_eta(&ControlFunction::LinearScale(2.0)).unwrap(), 24.0);
        let l = 1.0f64;
        assert_eq!(lambda_from_eta(&ControlFunction::LinearScale(l * l)).unwrap(), 12.0);
    }

    #[test]
    fn eta_and_theta_against_hand_chain() {
        let id = ControlFunction::<f64>::identity();
        let tp = theta_prime(&id);
        let hand = theta0(1.0 / theta0_inv(1.0));
        assert_eq!(hand, 27.0);
        assert!((tp.eval(1.0).unwrap() - hand).abs() <= 1e-8);
        let eta = eta_from_theta_lambda(&id, 1.0).unwrap();
        let hand = 3.0 * theta0(1.0 / theta0_inv(1.0 / 3.0));
        assert_eq!(hand, 729.0);
        assert!((eta.eval(1.0).unwrap() - hand).abs() <= 1e-8);
        let th = theta_from_eta(&id);
        let hand = 1.0 / theta0_inv(1.0 / theta0(1.0));
        assert!((hand - 81.0).abs() < 1e-12);
        assert!((th.eval(1.0).unwrap() - hand).abs() <= 1e-8);
        assert!(eta_from_theta_lambda(&id, 0.5).is_err());
    }

    #[test]
    fn composed_functions_are_increasing() {
        let id = ControlFunction::<f64>::identity();
        let eta = eta_from_theta_lambda(&id, 1.0).unwrap();
        let th = theta_from_eta(&id);
        let mut prev = (0.0, 0.0);
        for k in 1..=100 {
            let t = 10f64.powf(-4.0 + 8.0 * k as f64 / 100.0);
            let cur = (eta.eval(t).unwrap(), th.eval(t).unwrap());
            assert!(cur.0 > prev.0 && cur.1 > prev.1);
            prev = cur;
        }
        assert!(th.eval(1e-12).unwrap() < 1e-4);
    }

    #[test]
    fn boundary_constants() {
        let id = ControlFunction::<f64>::identity();
        assert_eq!(m1_bound(1.0, 1.0, &id).unwrap(), 24.0);
        // θ₁ = id gives θ₁′ = id, so both terms equal 2 + 24
        assert!((m2_bound(1.0, 1.0, &id).unwrap() - 26.0).abs() < 1e-9);
        let th = ControlFunction::Theta0;
        let m2 = m2_bound(2.0, 1.5, &th).unwrap();
        let direct = 4.0 + 12.0 * theta0(6.0);
        let reverse = 4.0 + 12.0 / theta0_inv(1.0 / (4.0 * 1.5 * 4.0));
        assert!((m2 - direct.max(reverse)).abs() <= 1e-8 * m2);
    }
}
