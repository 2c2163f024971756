//! Guard-set files, angle arguments and exit codes.

use std::f64::consts::TAU;
use std::fmt;
use std::path::Path;

use serde::Deserialize;
use theta_region::{BBox, Error, Point};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Degeneracy(String),
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Degeneracy(_) => 3,
            CliError::Verification(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Degeneracy(m) => write!(f, "degeneracy: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Degeneracy { .. }
            | Error::ProbeDisagreement { .. }
            | Error::DegenerateChord(_)
            | Error::CoincidentPoints(_) => CliError::Degeneracy(e.to_string()),
            Error::Verification(m) => CliError::Verification(m),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Radians, or degrees with a `deg` suffix. Must lie in (0, 2π].
pub fn parse_theta(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let value = match t.strip_suffix("deg") {
        Some(d) => d
            .trim()
            .parse::<f64>()
            .map_err(|e| e.to_string())?
            .to_radians(),
        None => t.parse::<f64>().map_err(|e| e.to_string())?,
    };
    // Degrees are converted with rounding; 360deg is the full turn.
    let value = if (value - TAU).abs() <= 4.0 * f64::EPSILON * TAU {
        TAU
    } else {
        value
    };
    if !(value > 0.0 && value <= TAU) {
        return Err(format!("angle {value} outside (0, 2π]"));
    }
    Ok(value)
}

/// `x,y`.
pub fn parse_point(s: &str) -> Result<Point, String> {
    let v = parse_floats(s)?;
    match v[..] {
        [x, y] => Ok(Point::new(x, y)),
        _ => Err(format!("expected x,y, got {s:?}")),
    }
}

/// `xmin,ymin,xmax,ymax`.
pub fn parse_bbox(s: &str) -> Result<BBox, String> {
    let v = parse_floats(s)?;
    match v[..] {
        [x0, y0, x1, y1] if x0 < x1 && y0 < y1 => {
            Ok(BBox::new(Point::new(x0, y0), Point::new(x1, y1)))
        }
        _ => Err(format!(
            "expected xmin,ymin,xmax,ymax with min < max, got {s:?}"
        )),
    }
}

fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect()
}

#[derive(Deserialize)]
struct JsonInput {
    guards: Vec<[f64; 2]>,
    #[serde(default)]
    theta: Option<f64>,
}

/// A guard file and the angle stored in it, if any.
pub struct GuardInput {
    pub guards: Vec<Point>,
    pub theta: Option<f64>,
}

/// JSON (`{"guards": [[x, y], ...]}`, optionally with `theta`, so generated
/// lower-bound instances load directly) or CSV with one `x,y` per line and
/// an optional header.
pub fn load_guards(path: &Path) -> CliResult<GuardInput> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let input = if text.trim_start().starts_with('{') {
        let j: JsonInput = serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        GuardInput {
            guards: j.guards.into_iter().map(Point::from).collect(),
            theta: j.theta,
        }
    } else {
        GuardInput {
            guards: parse_csv(&text)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?,
            theta: None,
        }
    };
    if input.guards.is_empty() {
        return Err(CliError::Input(format!(
            "{}: empty guard set",
            path.display()
        )));
    }
    Ok(input)
}

fn parse_csv(text: &str) -> Result<Vec<Point>, String> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let nums: Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match nums {
            Ok(v) if v.len() == 2 => out.push(Point::new(v[0], v[1])),
            Err(_) if k == 0 => continue,
            _ => return Err(format!("line {}: expected x,y", k + 1)),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn angles() {
        assert_eq!(parse_theta("1.5").unwrap(), 1.5);
        assert!((parse_theta("90deg").unwrap() - PI / 2.0).abs() < 1e-15);
        assert_eq!(parse_theta("360deg").unwrap(), TAU);
        assert!(parse_theta("0").is_err());
        assert!(parse_theta("7").is_err());
        assert!(parse_theta("abc").is_err());
    }

    #[test]
    fn csv_with_header_and_comments() {
        let pts = parse_csv("x,y\n# note\n0,0\n 1.5 , 2\n\n3,4\n").unwrap();
        assert_eq!(
            pts,
            vec![
                Point::new(0.0, 0.0),
                Point::new(1.5, 2.0),
                Point::new(3.0, 4.0)
            ]
        );
        assert!(parse_csv("0,0\n1,2,3\n").is_err());
        assert!(parse_csv("0,0\nfoo,1\n").is_err());
    }

    #[test]
    fn exit_codes_by_error_kind() {
        let at = Point::new(0.0, 0.0);
        let code = |e: Error| CliError::from(e).exit_code();
        assert_eq!(code(Error::InvalidAngle(9.0)), 2);
        assert_eq!(code(Error::EmptyGuardSet), 2);
        assert_eq!(
            code(Error::Degeneracy {
                at,
                what: "x".into()
            }),
            3
        );
        assert_eq!(code(Error::ProbeDisagreement { face: 1, at }), 3);
        assert_eq!(code(Error::Verification("x".into())), 4);
    }

    #[test]
    fn points_and_boxes() {
        assert_eq!(parse_point("1,-2").unwrap(), Point::new(1.0, -2.0));
        assert!(parse_point("1").is_err());
        assert!(parse_bbox("0,0,1,1").is_ok());
        assert!(parse_bbox("1,0,0,1").is_err());
    }
}
