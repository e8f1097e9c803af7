//! Plain-text exports: CSV grids with `# key=value` headers and JSON curve
//! files. Doubles are written with 17 significant digits, so reading a file
//! back reproduces the grid bit for bit.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::screen::{Method, Screen};
use crate::spin::{screen_ranges, ScreenParams, TwoJ};

pub const TOOL_VERSION: &str = concat!("sixj-screen ", env!("CARGO_PKG_VERSION"));

/// Ordered `key=value` metadata written as CSV comment lines.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub entries: Vec<(String, String)>,
}

impl Header {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    /// Screen parameters, lattice ranges and tool version.
    pub fn for_params(params: &ScreenParams) -> Self {
        let mut h = Header::new();
        h.push("two_a", params.a.0)
            .push("two_b", params.b.0)
            .push("two_c", params.c.0)
            .push("two_d", params.d.0)
            .push("kappa2", params.kappa2)
            .push("two_x_range", format!("{}..{}", params.x_min.0, params.x_max.0))
            .push("two_y_range", format!("{}..{}", params.y_min.0, params.y_max.0))
            .push("tool_version", TOOL_VERSION);
        h
    }

    pub fn for_screen(screen: &Screen) -> Self {
        let mut h = Header::for_params(&screen.params);
        h.entries.insert(4, ("method".into(), screen.method.name().into()));
        h
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn write_to(&self, w: &mut impl Write) -> std::io::Result<()> {
        for (k, v) in &self.entries {
            writeln!(w, "# {k}={v}")?;
        }
        Ok(())
    }
}

/// A double with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Invalid(e.to_string())
}

/// Write a table: header comments, a column-name line, then rows.
pub fn write_table(w: &mut impl Write, header: &Header, columns: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    header.write_to(w).map_err(io_err)?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(columns).map_err(io_err)?;
    for r in rows {
        out.write_record(&r).map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

/// Screen as `two_x,two_y,u` rows, `y` outer and `x` inner.
pub fn write_screen_csv(w: &mut impl Write, screen: &Screen) -> Result<()> {
    let rows = screen.points().map(|(x, y, u)| vec![x.0.to_string(), y.0.to_string(), fmt_f64(u)]);
    write_table(w, &Header::for_screen(screen), &["two_x", "two_y", "u"], rows)
}

/// Header comments and data records of a table file.
pub fn read_table(r: impl BufRead) -> Result<(Header, Vec<String>, Vec<Vec<String>>)> {
    let mut header = Header::new();
    let mut body = String::new();
    for line in r.lines() {
        let line = line.map_err(io_err)?;
        if let Some(rest) = line.strip_prefix('#') {
            let (k, v) = rest.trim().split_once('=').ok_or_else(|| Error::Invalid(format!("bad header line: {line}")))?;
            header.push(k.trim(), v.trim());
        } else if !line.trim().is_empty() {
            body.push_str(&line);
            body.push('\n');
        }
    }
    let mut rd = csv::Reader::from_reader(body.as_bytes());
    let columns = rd.headers().map_err(io_err)?.iter().map(String::from).collect();
    let rows = rd
        .records()
        .map(|r| r.map(|r| r.iter().map(String::from).collect()).map_err(io_err))
        .collect::<Result<Vec<Vec<String>>>>()?;
    Ok((header, columns, rows))
}

fn parse<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::Invalid(format!("cannot parse {what}: {s:?}")))
}

/// Read a screen written by [`write_screen_csv`].
pub fn read_screen_csv(r: impl BufRead) -> Result<Screen> {
    let (header, columns, rows) = read_table(r)?;
    if columns != ["two_x", "two_y", "u"] {
        return Err(Error::Invalid(format!("unexpected columns {columns:?}")));
    }
    let key = |k: &str| header.get(k).ok_or_else(|| Error::Invalid(format!("missing header key {k}")));
    let q: Vec<u32> = ["two_a", "two_b", "two_c", "two_d"].iter().map(|k| parse(key(k)?, k)).collect::<Result<_>>()?;
    let params = screen_ranges(TwoJ(q[0]), TwoJ(q[1]), TwoJ(q[2]), TwoJ(q[3]))?;
    let method: Method = key("method")?.parse()?;
    let n = params.side();
    if rows.len() != n * n {
        return Err(Error::Invalid(format!("expected {} rows, found {}", n * n, rows.len())));
    }
    let mut values = vec![f64::NAN; n * n];
    for r in &rows {
        if r.len() != 3 {
            return Err(Error::Invalid(format!("bad row {r:?}")));
        }
        let x = TwoJ(parse(&r[0], "two_x")?);
        let y = TwoJ(parse(&r[1], "two_y")?);
        let (ix, iy) = match (params.x_index(x), params.y_index(y)) {
            (Some(ix), Some(iy)) => (ix, iy),
            _ => return Err(Error::OutOfRange { x, y }),
        };
        if !values[ix * n + iy].is_nan() {
            return Err(Error::Invalid(format!("duplicate point ({}, {})", x.0, y.0)));
        }
        values[ix * n + iy] = parse(&r[2], "u")?;
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Invalid("screen has missing or NaN entries".into()));
    }
    Screen::from_values(params, method, values)
}

/// Named `[X, Y]` curves in shifted coordinates, with metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveFile {
    pub meta: BTreeMap<String, String>,
    pub curves: BTreeMap<String, Vec<[f64; 2]>>,
}

impl CurveFile {
    pub fn new(params: &ScreenParams) -> Self {
        let mut meta: BTreeMap<String, String> = Header::for_params(params).entries.into_iter().collect();
        meta.insert("coordinates".into(), "shifted: X = x + 1/2, Y = y + 1/2".into());
        CurveFile { meta, curves: BTreeMap::new() }
    }

    pub fn add(&mut self, name: &str, points: Vec<[f64; 2]>) -> &mut Self {
        self.curves.insert(name.into(), points);
        self
    }

    pub fn write(&self, w: &mut impl Write) -> Result<()> {
        serde_json::to_writer_pretty(&mut *w, self).map_err(io_err)?;
        writeln!(w).map_err(io_err)
    }

    pub fn read(r: impl std::io::Read) -> Result<Self> {
        serde_json::from_reader(r).map_err(io_err)
    }
}

/// Screen as JSON: metadata plus rows of `U` indexed `[iy][ix]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScreenJson {
    pub meta: BTreeMap<String, String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn write_screen_json(w: &mut impl Write, screen: &Screen) -> Result<()> {
    let doc = ScreenJson {
        meta: Header::for_screen(screen).entries.into_iter().collect(),
        rows: (0..screen.side()).map(|iy| screen.row(iy)).collect(),
    };
    serde_json::to_writer(&mut *w, &doc).map_err(io_err)?;
    writeln!(w).map_err(io_err)
}

pub fn read_screen_json(r: impl std::io::Read) -> Result<Screen> {
    let doc: ScreenJson = serde_json::from_reader(r).map_err(io_err)?;
    let key = |k: &str| doc.meta.get(k).ok_or_else(|| Error::Invalid(format!("missing key {k}")));
    let q: Vec<u32> = ["two_a", "two_b", "two_c", "two_d"].iter().map(|k| parse(key(k)?, k)).collect::<Result<_>>()?;
    let params = screen_ranges(TwoJ(q[0]), TwoJ(q[1]), TwoJ(q[2]), TwoJ(q[3]))?;
    let method: Method = key("method")?.parse()?;
    if doc.rows.len() != params.side() || doc.rows.iter().any(|r| r.len() != params.side()) {
        return Err(Error::Invalid("screen rows do not match the parameters".into()));
    }
    Ok(Screen::from_rows(params, method, &doc.rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Exec;
    use crate::recursion::screen_by_eigensolve;

    fn screen() -> Screen {
        screen_by_eigensolve(&ScreenParams::new(7, 9, 10, 12).unwrap(), Exec::Sequential).unwrap()
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let s = screen();
        let mut buf = Vec::new();
        write_screen_csv(&mut buf, &s).unwrap();
        let back = read_screen_csv(buf.as_slice()).unwrap();
        assert_eq!(back.values(), s.values());
        assert_eq!(back.params, s.params);
        assert_eq!(back.method, s.method);
    }

    #[test]
    fn csv_layout() {
        let s = screen();
        let mut buf = Vec::new();
        write_screen_csv(&mut buf, &s).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# two_a=7");
        assert!(lines.contains(&"# method=eigensolve"));
        let first = lines.iter().position(|l| !l.starts_with('#')).unwrap();
        assert_eq!(lines[first], "two_x,two_y,u");
        // y outer, x inner
        let x0 = s.params.x_min.0;
        let y0 = s.params.y_min.0;
        assert!(lines[first + 1].starts_with(&format!("{x0},{y0},")));
        assert!(lines[first + 2].starts_with(&format!("{},{y0},", s.params.x_at(1).0)));
        assert_eq!(lines.len() - first - 1, s.values().len());
    }

    #[test]
    fn json_round_trips() {
        let s = screen();
        let mut buf = Vec::new();
        write_screen_json(&mut buf, &s).unwrap();
        assert_eq!(read_screen_json(buf.as_slice()).unwrap().values(), s.values());

        let mut c = CurveFile::new(&s.params);
        c.add("ridge", vec![[1.5, 2.25], [0.1, 1.0 / 3.0]]);
        let mut buf = Vec::new();
        c.write(&mut buf).unwrap();
        assert_eq!(CurveFile::read(buf.as_slice()).unwrap(), c);
    }

    #[test]
    fn malformed_input() {
        assert!(read_screen_csv("two_x,two_y,u\n".as_bytes()).is_err());
        assert!(read_screen_csv("# garbage\n".as_bytes()).is_err());
        let s = screen();
        let mut buf = Vec::new();
        write_screen_csv(&mut buf, &s).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let truncated: String = text.lines().take(text.lines().count() - 1).map(|l| format!("{l}\n")).collect();
        assert!(read_screen_csv(truncated.as_bytes()).is_err());
        // a coordinate edited onto another point
        let first = text.lines().position(|l| l.starts_with("two_x")).unwrap() + 1;
        let y1 = s.params.y_at(1).0;
        let moved: String = text
            .lines()
            .enumerate()
            .map(|(i, l)| {
                if i == first {
                    let parts: Vec<&str> = l.split(',').collect();
                    format!("{},{y1},{}\n", parts[0], parts[2])
                } else {
                    format!("{l}\n")
                }
            })
            .collect();
        assert!(read_screen_csv(moved.as_bytes()).unwrap_err().to_string().contains("duplicate"));
    }

    #[test]
    fn seventeen_digits() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, f64::MIN_POSITIVE, 1e300] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }
}
