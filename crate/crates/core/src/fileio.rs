//! Text formats shared with the CLI: point sets (one `x,y` per line) and
//! chain files (one `cx,cy,r` per line with an optional trailing terminal
//! line `u:ux,uy v:vx,vy`). `#` starts a comment line.

use thiserror::Error;

use crate::geom::{Circle, Point};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("line {0}: expected `{1}`, got `{2}`")]
    Malformed(usize, &'static str, String),
    #[error("line {0}: {1} is not a finite number")]
    BadNumber(usize, String),
    #[error("line {0}: radius must be positive")]
    BadRadius(usize),
}

fn parse_f64(line_no: usize, s: &str) -> Result<f64, ParseError> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| ParseError::BadNumber(line_no, s.trim().to_string()))?;
    if !v.is_finite() {
        return Err(ParseError::BadNumber(line_no, s.trim().to_string()));
    }
    Ok(v)
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Parse a point-set file: one `x,y` pair per line.
pub fn parse_points(text: &str) -> Result<Vec<Point>, ParseError> {
    let mut out = Vec::new();
    for (no, line) in content_lines(text) {
        let mut it = line.split(',');
        let (Some(x), Some(y), None) = (it.next(), it.next(), it.next()) else {
            return Err(ParseError::Malformed(no, "x,y", line.to_string()));
        };
        out.push(Point::new(parse_f64(no, x)?, parse_f64(no, y)?));
    }
    Ok(out)
}

pub fn points_to_string(points: &[Point]) -> String {
    let mut s = String::new();
    for p in points {
        s.push_str(&format!("{:?},{:?}\n", p.x, p.y));
    }
    s
}

/// Parse a chain file: `cx,cy,r` lines, optionally ending with a terminal
/// line `u:ux,uy v:vx,vy`.
#[allow(clippy::type_complexity)]
pub fn parse_chain_file(text: &str) -> Result<(Vec<Circle>, Option<(Point, Point)>), ParseError> {
    let mut circles = Vec::new();
    let mut terminals = None;
    for (no, line) in content_lines(text) {
        if line.starts_with("u:") {
            let mut halves = line.split_whitespace();
            let (Some(uh), Some(vh), None) = (halves.next(), halves.next(), halves.next()) else {
                return Err(ParseError::Malformed(
                    no,
                    "u:ux,uy v:vx,vy",
                    line.to_string(),
                ));
            };
            let u = uh.strip_prefix("u:");
            let v = vh.strip_prefix("v:");
            let (Some(u), Some(v)) = (u, v) else {
                return Err(ParseError::Malformed(
                    no,
                    "u:ux,uy v:vx,vy",
                    line.to_string(),
                ));
            };
            let parse_pair = |s: &str| -> Result<Point, ParseError> {
                let mut it = s.split(',');
                let (Some(x), Some(y), None) = (it.next(), it.next(), it.next()) else {
                    return Err(ParseError::Malformed(no, "x,y", s.to_string()));
                };
                Ok(Point::new(parse_f64(no, x)?, parse_f64(no, y)?))
            };
            terminals = Some((parse_pair(u)?, parse_pair(v)?));
            continue;
        }
        let mut it = line.split(',');
        let (Some(cx), Some(cy), Some(r), None) = (it.next(), it.next(), it.next(), it.next())
        else {
            return Err(ParseError::Malformed(no, "cx,cy,r", line.to_string()));
        };
        let center = Point::new(parse_f64(no, cx)?, parse_f64(no, cy)?);
        let radius = parse_f64(no, r)?;
        let circle = Circle::new(center, radius).map_err(|_| ParseError::BadRadius(no))?;
        circles.push(circle);
    }
    Ok((circles, terminals))
}

pub fn chain_to_string(circles: &[Circle], terminals: Option<(Point, Point)>) -> String {
    let mut s = String::new();
    for c in circles {
        s.push_str(&format!(
            "{:?},{:?},{:?}\n",
            c.center.x, c.center.y, c.radius
        ));
    }
    if let Some((u, v)) = terminals {
        s.push_str(&format!("u:{:?},{:?} v:{:?},{:?}\n", u.x, u.y, v.x, v.y));
    }
    s
}
