//! JSON and CSV layouts. All rationals are written as exact `num/den` strings.

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use kwise_core::extremal::{verify_certificate, ExtremalCertificate};
use kwise_core::suites::CheckRecord;

/// Ordered `name -> bool` map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Checks(pub Vec<(&'static str, bool)>);

impl Serialize for Checks {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl Checks {
    pub fn of(cert: &ExtremalCertificate) -> Self {
        Checks(verify_certificate(cert).checks.iter().map(|c| (c.name, c.pass)).collect())
    }

    pub fn all_pass(&self) -> bool {
        self.0.iter().all(|c| c.1)
    }
}

fn strings<T: ToString>(items: &[T]) -> Vec<String> {
    items.iter().map(ToString::to_string).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct DualSearchJson {
    pub n: u64,
    pub k: u64,
    #[serde(rename = "M")]
    pub m: String,
    pub dual_zeros: Vec<u64>,
    pub dual_coeffs: Vec<String>,
    pub degenerate: bool,
    pub minimizers: u64,
    pub checks: Checks,
}

impl DualSearchJson {
    pub fn new(cert: &ExtremalCertificate) -> Self {
        Self {
            n: cert.spec.n(),
            k: cert.k,
            m: cert.value.to_string(),
            dual_zeros: cert.dual_zeros.clone(),
            dual_coeffs: strings(cert.dual.coeffs()),
            degenerate: cert.degenerate,
            minimizers: cert.minimizers.unwrap_or(1),
            checks: Checks::of(cert),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateJson {
    pub n: u64,
    pub k: u64,
    pub p: String,
    pub method: &'static str,
    #[serde(rename = "M")]
    pub m: String,
    pub support: Vec<u64>,
    pub masses: Vec<String>,
    pub dual_zeros: Vec<u64>,
    pub dual_coeffs: Vec<String>,
    pub degenerate: bool,
    pub checks: Checks,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduction: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual_search: Option<DualSearchJson>,
}

impl CertificateJson {
    pub fn new(cert: &ExtremalCertificate, method: &'static str) -> Self {
        Self {
            n: cert.spec.n(),
            k: cert.k,
            p: cert.spec.p().to_string(),
            method,
            m: cert.value.to_string(),
            support: cert.distribution.support().to_vec(),
            masses: strings(cert.distribution.masses()),
            dual_zeros: cert.dual_zeros.clone(),
            dual_coeffs: strings(cert.dual.coeffs()),
            degenerate: cert.degenerate,
            checks: Checks::of(cert),
            reduction: cert.odd_reduction.then_some("odd"),
            dual_search: None,
        }
    }
}

/// A suite record as `{check, params, pass[, value]}`.
pub struct RecordJson<'a>(pub &'a CheckRecord);

impl Serialize for RecordJson<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        struct Params<'b>(&'b [(&'static str, String)]);
        impl Serialize for Params<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                let mut map = s.serialize_map(Some(self.0.len()))?;
                for (k, v) in self.0 {
                    map.serialize_entry(k, v)?;
                }
                map.end()
            }
        }
        let r = self.0;
        let mut map = s.serialize_map(None)?;
        map.serialize_entry("check", r.check)?;
        map.serialize_entry("params", &Params(&r.params))?;
        map.serialize_entry("pass", &r.pass)?;
        if let Some(v) = &r.value {
            map.serialize_entry("value", v)?;
        }
        map.end()
    }
}

/// Pretty JSON followed by a newline.
pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}
