//! Parsing of the `--u0` and `--f` data descriptions.
//!
//! ```text
//! spatial := zero | x^P | sin(K)          sin(K) is sqrt(2) sin(K pi x)
//! forcing := zero | spatial | spatial*t^Q
//! ```

use fracwave::dg_solver::ForcingSpec;
use fracwave::fem1d::SpatialFunctionSpec;

pub fn parse_spatial(s: &str) -> Result<SpatialFunctionSpec, String> {
    let s = s.trim();
    if s == "zero" || s == "0" {
        return Ok(SpatialFunctionSpec::Zero);
    }
    if let Some(p) = s.strip_prefix("x^") {
        let p: f64 = p.trim_matches(|c| c == '(' || c == ')').parse().map_err(|_| format!("bad exponent in {s:?}"))?;
        return Ok(SpatialFunctionSpec::power(p));
    }
    if let Some(k) = s.strip_prefix("sin(").and_then(|r| r.strip_suffix(')')) {
        let k: usize = k.parse().map_err(|_| format!("bad mode number in {s:?}"))?;
        if k == 0 {
            return Err("sine mode numbers start at 1".into());
        }
        return Ok(SpatialFunctionSpec::sine_mode(k));
    }
    Err(format!("cannot parse spatial function {s:?} (expected zero, x^P or sin(K))"))
}

pub fn parse_forcing(s: &str) -> Result<ForcingSpec, String> {
    let s = s.trim();
    match s.split_once("*t^") {
        Some((x, q)) => {
            let q: f64 =
                q.trim_matches(|c| c == '(' || c == ')').parse().map_err(|_| format!("bad time exponent in {s:?}"))?;
            Ok(ForcingSpec::Separable { x: parse_spatial(x)?, q })
        }
        None => match parse_spatial(s)? {
            SpatialFunctionSpec::Zero => Ok(ForcingSpec::Zero),
            x => Ok(ForcingSpec::Constant { x }),
        },
    }
}
