use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

/// 17 significant digits, enough to round-trip any f64.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Comma-separated report: `#` metadata lines, one header row, data rows.
#[derive(Debug, Default)]
pub struct Report {
    meta: Vec<(String, String)>,
    timestamp: Option<u64>,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Report {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Report {
        Report {
            columns: columns.into_iter().map(Into::into).collect(),
            ..Report::default()
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    /// Puts `other`'s metadata lines ahead of this report's own.
    pub fn prepend_meta(&mut self, other: Report) {
        let mine = std::mem::replace(&mut self.meta, other.meta);
        self.meta.extend(mine);
    }

    pub fn timestamp(&mut self, unix_seconds: u64) -> &mut Self {
        self.timestamp = Some(unix_seconds);
        self
    }

    pub fn row(&mut self, cells: Vec<String>) {
        assert_eq!(cells.len(), self.columns.len(), "row width does not match header");
        self.rows.push(cells);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(s, "# {k}: {v}");
        }
        if let Some(t) = self.timestamp {
            let _ = writeln!(s, "# generated_unix: {t}");
        }
        let _ = writeln!(s, "{}", self.columns.join(","));
        for r in &self.rows {
            let _ = writeln!(s, "{}", r.join(","));
        }
        s
    }

    /// Writes to `path`, or stdout when `None`.
    pub fn emit(&self, path: Option<&Path>) -> std::io::Result<()> {
        let text = self.render();
        match path {
            Some(p) => std::fs::write(p, text),
            None => std::io::stdout().lock().write_all(text.as_bytes()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting() {
        assert_eq!(num(0.5 / 0.68), "7.3529411764705876e-1");
        assert_eq!(num(1.0), "1.0000000000000000e0");
        assert_eq!(num(f64::INFINITY), "inf");
        assert_eq!(opt_num(None), "");
        let x: f64 = num(0.1).parse().unwrap();
        assert_eq!(x, 0.1);
    }

    #[test]
    fn render_layout() {
        let mut r = Report::new(["a", "b"]);
        r.meta("command", "demo");
        r.row(vec!["1".into(), num(2.0)]);
        assert_eq!(r.render(), "# command: demo\na,b\n1,2.0000000000000000e0\n");
        r.timestamp(5);
        assert!(r.render().contains("# generated_unix: 5\n"));
    }
}
