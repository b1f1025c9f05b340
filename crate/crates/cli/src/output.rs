//! Deterministic JSON emission. Numbers print with six decimals so the
//! same invocation always produces the same bytes.

use pipstats::PipEstimate;

pub fn fmt_f64(v: f64) -> String {
    // normalize negative zero so rounding never prints "-0.000000"
    let r = (v * 1e6).round() / 1e6;
    format!("{:.6}", if r == 0.0 { 0.0 } else { v })
}

/// An ordered JSON object writer; key order is insertion order.
#[derive(Default)]
pub struct JsonObject {
    fields: Vec<(String, String)>,
}

impl JsonObject {
    pub fn new() -> Self {
        JsonObject::default()
    }

    pub fn number(mut self, key: &str, value: f64) -> Self {
        self.fields.push((key.to_string(), fmt_f64(value)));
        self
    }

    pub fn maybe_number(self, key: &str, value: Option<f64>) -> Self {
        match value {
            Some(v) => self.number(key, v),
            None => self.null(key),
        }
    }

    pub fn integer(mut self, key: &str, value: u64) -> Self {
        self.fields.push((key.to_string(), value.to_string()));
        self
    }

    pub fn string(mut self, key: &str, value: &str) -> Self {
        self.fields
            .push((key.to_string(), format!("\"{}\"", escape(value))));
        self
    }

    pub fn null(mut self, key: &str) -> Self {
        self.fields.push((key.to_string(), "null".to_string()));
        self
    }

    pub fn raw(mut self, key: &str, value: String) -> Self {
        self.fields.push((key.to_string(), value));
        self
    }

    pub fn render(&self) -> String {
        let body: Vec<String> = self
            .fields
            .iter()
            .map(|(k, v)| format!("\"{}\": {}", escape(k), v))
            .collect();
        format!("{{{}}}", body.join(", "))
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn render_array(items: Vec<String>) -> String {
    format!("[{}]", items.join(", "))
}

/// The standard JSON shape for one estimate record.
pub fn estimate_json(e: &PipEstimate) -> JsonObject {
    let mut meta = JsonObject::new();
    if let Some(k) = e.meta.k {
        meta = meta.integer("k", k as u64);
    }
    if let Some(r) = e.meta.repeats {
        meta = meta.integer("repeats", r as u64);
    }
    if let Some(v) = e.meta.n_train {
        meta = meta.integer("n_train", v as u64);
    }
    if let Some(v) = e.meta.n_test {
        meta = meta.integer("n_test", v as u64);
    }
    if let Some(v) = e.meta.n_mc {
        meta = meta.integer("n_mc", v);
    }
    let mut obj = JsonObject::new()
        .string("method", &e.method)
        .number("estimate", e.estimate)
        .maybe_number("lower", e.lower)
        .maybe_number("upper", e.upper);
    obj = match e.seed {
        Some(s) => obj.integer("seed", s),
        None => obj.null("seed"),
    };
    obj.raw("meta", meta.render())
}
