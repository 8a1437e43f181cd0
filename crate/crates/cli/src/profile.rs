//! Text form of initial profiles: `+`-separated terms such as
//! `constant(1.0) + single_mode(0.5, 1, cos)`.

use std::fmt;

use fracalign::initial::{Phase, Profile};

/// Initial velocity: an explicit profile or the `G = 0` velocity of the
/// initial density with the given mean.
#[derive(Debug, Clone, PartialEq)]
pub enum VelocitySpec {
    Profile(Profile),
    GZero { mean: f64 },
}

impl fmt::Display for VelocitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VelocitySpec::Profile(p) => write!(f, "{p}"),
            VelocitySpec::GZero { mean } => write!(f, "g_zero({mean:?})"),
        }
    }
}

struct Call<'a> {
    name: &'a str,
    args: Vec<&'a str>,
}

fn split_top_level(text: &str) -> Result<Vec<&str>, String> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(format!("unbalanced ')' in '{text}'"));
                }
            }
            '+' if depth == 0 => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(format!("unbalanced '(' in '{text}'"));
    }
    parts.push(&text[start..]);
    Ok(parts)
}

fn parse_call(term: &str) -> Result<Call<'_>, String> {
    let term = term.trim();
    let open = term
        .find('(')
        .ok_or_else(|| format!("expected name(arguments), got '{term}'"))?;
    if !term.ends_with(')') {
        return Err(format!("expected name(arguments), got '{term}'"));
    }
    let name = term[..open].trim();
    let inner = term[open + 1..term.len() - 1].trim();
    let args = if inner.is_empty() {
        Vec::new()
    } else {
        inner.split(',').map(str::trim).collect()
    };
    Ok(Call { name, args })
}

fn number(call: &Call<'_>, i: usize) -> Result<f64, String> {
    let s = call.args[i];
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| {
            format!(
                "{}: argument {} is not a finite number: '{s}'",
                call.name,
                i + 1
            )
        })
}

fn count(call: &Call<'_>, i: usize) -> Result<u32, String> {
    let s = call.args[i];
    s.parse::<u32>().map_err(|_| {
        format!(
            "{}: argument {} is not a nonnegative integer: '{s}'",
            call.name,
            i + 1
        )
    })
}

fn arity(call: &Call<'_>, allowed: &[usize]) -> Result<(), String> {
    if allowed.contains(&call.args.len()) {
        Ok(())
    } else {
        Err(format!(
            "{} takes {} argument(s), got {}",
            call.name,
            allowed
                .iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(" or "),
            call.args.len()
        ))
    }
}

fn parse_term(call: &Call<'_>) -> Result<Profile, String> {
    let profile = match call.name {
        "constant" => {
            arity(call, &[1])?;
            Profile::Constant(number(call, 0)?)
        }
        "single_mode" => {
            arity(call, &[2, 3])?;
            let phase = match call.args.get(2).copied() {
                None | Some("cos") => Phase::Cos,
                Some("sin") => Phase::Sin,
                Some(other) => {
                    return Err(format!(
                        "single_mode: phase must be cos or sin, got '{other}'"
                    ))
                }
            };
            Profile::SingleMode {
                amplitude: number(call, 0)?,
                wavenumber: count(call, 1)?,
                phase,
            }
        }
        "steep_front" => {
            arity(call, &[2])?;
            Profile::SteepFront {
                amplitude: number(call, 0)?,
                sharpness: number(call, 1)?,
            }
        }
        "random_modes" => {
            arity(call, &[2])?;
            Profile::RandomModes {
                amplitude: number(call, 0)?,
                modes: count(call, 1)?,
            }
        }
        other => return Err(format!("unknown profile '{other}'")),
    };
    profile.validate().map_err(|e| e.to_string())?;
    Ok(profile)
}

pub fn parse_profile(text: &str) -> Result<Profile, String> {
    let mut terms = split_top_level(text)?
        .into_iter()
        .map(|t| parse_call(t).and_then(|c| parse_term(&c)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(if terms.len() == 1 {
        terms.remove(0)
    } else {
        Profile::Sum(terms)
    })
}

pub fn parse_velocity(text: &str) -> Result<VelocitySpec, String> {
    let parts = split_top_level(text)?;
    if parts.len() == 1 {
        let call = parse_call(parts[0])?;
        if call.name == "g_zero" {
            arity(&call, &[0, 1])?;
            let mean = if call.args.is_empty() {
                0.0
            } else {
                number(&call, 0)?
            };
            return Ok(VelocitySpec::GZero { mean });
        }
        // long form naming the density explicitly
        if call.name == "g_zero_from" {
            arity(&call, &[1, 2])?;
            if call.args[0] != "rho" {
                return Err(format!(
                    "g_zero_from: first argument must be rho, got '{}'",
                    call.args[0]
                ));
            }
            let mean = if call.args.len() == 2 {
                number(&call, 1)?
            } else {
                0.0
            };
            return Ok(VelocitySpec::GZero { mean });
        }
    }
    parse_profile(text).map(VelocitySpec::Profile)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sums_and_round_trips() {
        let text = "constant(1.0) + single_mode(0.5, 2, sin) + steep_front(2.0, 3.0)";
        let p = parse_profile(text).unwrap();
        assert_eq!(p.to_string(), text);
        assert_eq!(parse_profile(&p.to_string()).unwrap(), p);
        assert_eq!(
            parse_profile("single_mode(1e-3, 1)").unwrap(),
            Profile::SingleMode {
                amplitude: 1e-3,
                wavenumber: 1,
                phase: Phase::Cos
            }
        );
    }

    #[test]
    fn velocity_forms() {
        assert_eq!(
            parse_velocity("g_zero(0.25)").unwrap(),
            VelocitySpec::GZero { mean: 0.25 }
        );
        assert_eq!(
            parse_velocity("g_zero()").unwrap(),
            VelocitySpec::GZero { mean: 0.0 }
        );
        assert_eq!(
            parse_velocity("g_zero_from(rho)").unwrap(),
            VelocitySpec::GZero { mean: 0.0 }
        );
        assert_eq!(
            parse_velocity("g_zero_from(rho, -1.5)").unwrap(),
            VelocitySpec::GZero { mean: -1.5 }
        );
        assert!(parse_velocity("g_zero_from(u)").is_err());
        assert!(matches!(
            parse_velocity("constant(-0.5)").unwrap(),
            VelocitySpec::Profile(Profile::Constant(c)) if c == -0.5
        ));
    }

    #[test]
    fn errors_name_the_problem() {
        assert!(parse_profile("cosine(1)")
            .unwrap_err()
            .contains("unknown profile"));
        assert!(parse_profile("constant(1")
            .unwrap_err()
            .contains("unbalanced"));
        assert!(parse_profile("single_mode(1, 0)").is_err());
        assert!(parse_profile("constant(nan)").is_err());
        assert!(parse_profile("single_mode(1, 1, tan)")
            .unwrap_err()
            .contains("phase"));
        assert!(parse_velocity("g_zero(1) + constant(1)").is_err());
    }
}
