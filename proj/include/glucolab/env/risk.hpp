#pragma once

namespace glucolab {

/// Magni risk 10 * (3.5506 * (ln(g)^0.8353 - 3.7932))^2 with the natural log.
/// Zero near 138.94 mg/dl; low glucose is penalized more than high.
/// Throws for g <= 0.
double magni_risk(double glucose);

/// Glucose at which magni_risk is zero: exp(3.7932^(1/0.8353)).
double magni_risk_minimum();

}  // namespace glucolab
