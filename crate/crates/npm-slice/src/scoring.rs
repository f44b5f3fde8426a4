//! Slice scoring: prompt assembly, strict verdict parsing, and three
//! interchangeable scorers.
//!
//! A slice becomes a [`PromptBundle`] (auditor instructions + the snippet
//! verbatim).  A scorer answers with raw text that must contain exactly one
//! JSON object with the four fields of [`Scores`]; anything else leaves the
//! slice unscored with a recorded reason — scores are never fabricated.
//!
//! Scorers:
//! * [`StubScorer`] — deterministic closed-form formula over the snippet
//!   text and the catalog; the test oracle and offline default.
//! * [`RecordedScorer`] — replays canned responses keyed by a request
//!   fingerprint; makes end-to-end runs hermetic.
//! * [`RemoteScorer`] — HTTP JSON chat-completion client with retries and
//!   exponential backoff.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::catalog::{ApiCatalog, Group};
use crate::slicer::Slice;

/// Placeholder in prompt templates replaced by the slice snippet.
pub const SNIPPET_PLACEHOLDER: &str = "{{SNIPPET}}";

/// The builtin auditor prompt.  The snippet placeholder sits at the end:
/// instructions and few-shot examples always precede the analyzed code.
pub const BUILTIN_TEMPLATE: &str = r#"You are a professional static security code auditor.

Analyze a single JavaScript (or Node.js) code fragment (a "code slice") and output EXACTLY one JSON object only.

Strict Rules:
1. Do NOT execute the code. Perform only static analysis.
2. ALWAYS return exactly one JSON object.
3. DO NOT add explanations, comments, or extra text.
4. DO NOT wrap JSON in markdown or quotes.
5. If the code is safe or benign, still return the JSON object with appropriate numeric scores - DO NOT write "safe" or "benign".
6. If unsure, use 0.0 for numeric fields and empty string for textual fields.
7. Follow the exact key order below:
{
"confidence": float,       // overall confidence (0.00-1.00)
"obfuscated": float,       // estimated obfuscation likelihood (0.00-1.00)
"malware": float,          // estimated malware likelihood (0.00-1.00)
"securityRisk": float      // estimated security risk severity (0.00-1.00)
}

Scoring guidance:
- Confidence >0.8 = strong evidence; 0.5-0.8 = medium; <0.5 = low.
- Obfuscated high if code has base64, hex, XOR, eval, Function, or string mangling.
- Malware high if code downloads, executes, or exfiltrates data.
- SecurityRisk high if code can modify system, files, or environment unsafely.

### Example 1 - Malicious
Input:
const request = https.get(fileUrl, (response) => {
    const fileStream = fs.createWriteStream(downloadPath);
    response.pipe(fileStream);
    fileStream.on('finish', () => executeFile(downloadPath));
});
Output:
{
"confidence": 0.95,
"obfuscated": 0.00,
"malware": 0.90,
"securityRisk": 0.95
}

### Example 2 - Benign
Input:
exports.getIDToken = exports.getState = exports.saveState = void 0;
const runtimeUrl = process.env['ACTIONS_ID_TOKEN_REQUEST_URL'];
function issueCommand(command, properties, message) {
    const cmd = new Command(command, properties, message);
    process.stdout.write(cmd.toString() + os.EOL);
}
fs.appendFileSync(filePath, `${message}${os.EOL}`, { encoding: 'utf8' });
Output:
{
"confidence": 0.95,
"obfuscated": 0.00,
"malware": 0.00,
"securityRisk": 0.05
}

Important Instruction:
- Only respond with a single JSON object.
- No explanations, no extra text, no markdown, no commentary.
- Work step-by-step internally to ensure accuracy, but output only JSON.

Analyze the following code slice:
{{SNIPPET}}
"#;

/// A fully assembled scorer request.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub system_text: String,
    /// The slice snippet, byte for byte.
    pub user_text: String,
    pub slice_ref: String,
}

#[derive(Debug, Error, PartialEq)]
pub enum PromptError {
    #[error("template has no {SNIPPET_PLACEHOLDER} placeholder")]
    TemplateMissingPlaceholder,
    #[error("template has more than one {SNIPPET_PLACEHOLDER} placeholder")]
    TemplateMultiplePlaceholders,
}

/// Turn a slice into a request: everything around the placeholder becomes
/// the system text (verbatim), the snippet becomes the user text.
pub fn build_prompt(slice: &Slice, template: &str) -> Result<PromptBundle, PromptError> {
    match template.matches(SNIPPET_PLACEHOLDER).count() {
        0 => return Err(PromptError::TemplateMissingPlaceholder),
        1 => {}
        _ => return Err(PromptError::TemplateMultiplePlaceholders),
    }
    let (before, after) = template
        .split_once(SNIPPET_PLACEHOLDER)
        .expect("placeholder present");
    Ok(PromptBundle {
        system_text: format!("{before}{after}"),
        user_text: slice.snippet.clone(),
        slice_ref: slice.slice_ref(),
    })
}

/// Fingerprint used to key recorded responses.
pub fn request_fingerprint(bundle: &PromptBundle) -> String {
    let mut h = Sha256::new();
    h.update(bundle.system_text.as_bytes());
    h.update([0u8]);
    h.update(bundle.user_text.as_bytes());
    let digest = h.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// The four-field verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub confidence: f64,
    pub obfuscated: f64,
    pub malware: f64,
    #[serde(rename = "securityRisk")]
    pub security_risk: f64,
}

/// One scoring outcome per slice: either the verdict or a reason why the
/// slice stayed unscored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub slice_ref: String,
    pub scorer_id: String,
    pub latency_ms: u64,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    pub scores: Option<Scores>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unscored: Option<String>,
}

impl ScoreRecord {
    pub fn is_scored(&self) -> bool {
        self.scores.is_some()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("response is not a JSON object")]
    NotJson,
    #[error("missing key {0:?}")]
    MissingKey(String),
    #[error("key {key:?} out of range: {value}")]
    OutOfRange { key: String, value: String },
    #[error("response contains more than one JSON object")]
    MultipleObjects,
    #[error("unexpected key {0:?}")]
    UnexpectedKey(String),
}

const SCORE_KEYS: [&str; 4] = ["confidence", "obfuscated", "malware", "securityRisk"];

/// Strict verdict parser: exactly one JSON object with exactly the four
/// score keys, each numeric in [0, 1].  Surrounding whitespace and one
/// Markdown code fence are tolerated; everything else is rejected.
pub fn parse_score(raw: &str) -> Result<Scores, ParseError> {
    let mut text = raw.trim();
    if text.starts_with("```") {
        // Strip one fence pair: drop the opening line and a trailing ```.
        let after_open = text.splitn(2, '\n').nth(1).ok_or(ParseError::NotJson)?;
        text = after_open.trim_end();
        text = text.strip_suffix("```").ok_or(ParseError::NotJson)?;
        text = text.trim();
    }

    let mut stream = serde_json::Deserializer::from_str(text).into_iter::<serde_json::Value>();
    let first = match stream.next() {
        Some(Ok(v)) => v,
        _ => return Err(ParseError::NotJson),
    };
    let consumed = stream.byte_offset();
    let rest = text[consumed..].trim();
    if !rest.is_empty() {
        return if rest.starts_with('{') {
            Err(ParseError::MultipleObjects)
        } else {
            Err(ParseError::NotJson)
        };
    }
    let obj = first.as_object().ok_or(ParseError::NotJson)?;

    for key in obj.keys() {
        if !SCORE_KEYS.contains(&key.as_str()) {
            return Err(ParseError::UnexpectedKey(key.clone()));
        }
    }
    let mut vals = [0f64; 4];
    for (i, key) in SCORE_KEYS.iter().enumerate() {
        let v = obj
            .get(*key)
            .ok_or_else(|| ParseError::MissingKey((*key).to_string()))?;
        let n = v.as_f64().ok_or_else(|| ParseError::OutOfRange {
            key: (*key).to_string(),
            value: v.to_string(),
        })?;
        if !(0.0..=1.0).contains(&n) {
            return Err(ParseError::OutOfRange { key: (*key).to_string(), value: n.to_string() });
        }
        vals[i] = n;
    }
    Ok(Scores {
        confidence: vals[0],
        obfuscated: vals[1],
        malware: vals[2],
        security_risk: vals[3],
    })
}

/// Connection settings for the remote scorer.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ScorerConfig {
    /// Chat-completion endpoint; required for the remote scorer only.
    pub endpoint_url: Option<String>,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
    /// Model name placed in the request payload.
    pub model: String,
    /// Concurrent request ceiling.
    pub max_in_flight: usize,
    /// Total attempts per slice (transport and parse failures both retry).
    pub retries: u32,
    #[serde(with = "duration_ms")]
    pub request_timeout: Duration,
    /// Decoding temperature; zero requests deterministic decoding.
    pub temperature: f64,
}

impl Default for ScorerConfig {
    fn default() -> Self {
        ScorerConfig {
            endpoint_url: None,
            api_key_env: "SCORER_API_KEY".to_string(),
            model: "auditor".to_string(),
            max_in_flight: 4,
            retries: 3,
            request_timeout: Duration::from_secs(30),
            temperature: 0.0,
        }
    }
}

mod duration_ms {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_millis() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let ms = u64::deserialize(d)?;
        Ok(Duration::from_millis(ms))
    }
}

/// Anything that can turn a prompt into a score record.
pub trait Scorer: Send + Sync {
    fn id(&self) -> &str;
    fn score(&self, bundle: &PromptBundle) -> ScoreRecord;
}

// ---------------------------------------------------------------------------
// Offline stub
// ---------------------------------------------------------------------------

/// Deterministic offline scorer: a closed-form formula over the snippet
/// text and the catalog.  Exists so every pipeline stage can run — and be
/// tested against an independent oracle — without network access.
pub struct StubScorer {
    catalog: ApiCatalog,
    obfuscation: regex::Regex,
}

impl StubScorer {
    pub fn new(catalog: ApiCatalog) -> StubScorer {
        StubScorer {
            catalog,
            // A long base64/hex run inside a string literal.
            obfuscation: regex::Regex::new(
                "[\"'`][A-Za-z0-9+/=]{24,}[\"'`]|(?:\\\\x[0-9a-fA-F]{2}){8,}",
            )
            .expect("static regex"),
        }
    }

    fn evaluate(&self, snippet: &str) -> Scores {
        let risky_sink = self.catalog.text_has(snippet, |p| {
            p.sink_capable()
                && matches!(p.group, Group::SystemExecution | Group::NetworkCommunication)
        });
        let any_sink = self.catalog.text_has(snippet, |p| p.sink_capable());
        let any_source = self.catalog.text_has(snippet, |p| p.source_capable());
        let obfuscated_hit = self.obfuscation.is_match(snippet);

        let malware = (0.45 * f64::from(u8::from(risky_sink))
            + 0.35 * f64::from(u8::from(any_source))
            + 0.20 * f64::from(u8::from(any_source && any_sink)))
        .min(1.0);
        let obfuscated = (0.9 * f64::from(u8::from(obfuscated_hit))).min(1.0);
        let security_risk = malware.max(0.5 * obfuscated);
        let confidence = if risky_sink || any_source || obfuscated_hit { 0.9 } else { 0.3 };
        Scores { confidence, obfuscated, malware, security_risk }
    }
}

impl Scorer for StubScorer {
    fn id(&self) -> &str {
        "stub"
    }

    fn score(&self, bundle: &PromptBundle) -> ScoreRecord {
        ScoreRecord {
            slice_ref: bundle.slice_ref.clone(),
            scorer_id: self.id().to_string(),
            latency_ms: 0,
            scores: Some(self.evaluate(&bundle.user_text)),
            unscored: None,
        }
    }
}

/// Score one slice directly with the stub formula.
pub fn score_stub(slice: &Slice, catalog: &ApiCatalog) -> ScoreRecord {
    let scorer = StubScorer::new(catalog.clone());
    ScoreRecord {
        slice_ref: slice.slice_ref(),
        scorer_id: "stub".to_string(),
        latency_ms: 0,
        scores: Some(scorer.evaluate(&slice.snippet)),
        unscored: None,
    }
}

// ---------------------------------------------------------------------------
// Recorded responses
// ---------------------------------------------------------------------------

/// Replays canned raw responses keyed by [`request_fingerprint`].
pub struct RecordedScorer {
    responses: HashMap<String, String>,
}

#[derive(Debug, Error)]
pub enum RecordedError {
    #[error("cannot read recorded responses {path}: {detail}")]
    Io { path: String, detail: String },
    #[error("malformed recorded responses {path}: {detail}")]
    Bad { path: String, detail: String },
}

impl RecordedScorer {
    pub fn new(responses: HashMap<String, String>) -> RecordedScorer {
        RecordedScorer { responses }
    }

    /// Load a JSON map of fingerprint → raw response text.
    pub fn load(path: impl AsRef<Path>) -> Result<RecordedScorer, RecordedError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| RecordedError::Io {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
        let responses: HashMap<String, String> =
            serde_json::from_str(&text).map_err(|e| RecordedError::Bad {
                path: path.display().to_string(),
                detail: e.to_string(),
            })?;
        Ok(RecordedScorer { responses })
    }
}

impl Scorer for RecordedScorer {
    fn id(&self) -> &str {
        "recorded"
    }

    fn score(&self, bundle: &PromptBundle) -> ScoreRecord {
        let key = request_fingerprint(bundle);
        let mut record = ScoreRecord {
            slice_ref: bundle.slice_ref.clone(),
            scorer_id: self.id().to_string(),
            latency_ms: 0,
            scores: None,
            unscored: None,
        };
        match self.responses.get(&key) {
            None => record.unscored = Some(format!("no recorded response for request {key}")),
            Some(raw) => match parse_score(raw) {
                Ok(s) => record.scores = Some(s),
                Err(e) => record.unscored = Some(e.to_string()),
            },
        }
        record
    }
}

// ---------------------------------------------------------------------------
// Remote HTTP scorer
// ---------------------------------------------------------------------------

/// Chat-completion client.  Each slice is one request; transport errors and
/// malformed verdicts both retry with exponential backoff until the attempt
/// budget runs out, after which the slice is left unscored with the last
/// failure as the reason.
pub struct RemoteScorer {
    config: ScorerConfig,
    agent: ureq::Agent,
}

impl RemoteScorer {
    pub fn new(config: ScorerConfig) -> RemoteScorer {
        let agent = ureq::AgentBuilder::new()
            .timeout(config.request_timeout)
            .build();
        RemoteScorer { config, agent }
    }

    fn attempt(&self, endpoint: &str, bundle: &PromptBundle) -> Result<Scores, String> {
        let payload = serde_json::json!({
            "model": self.config.model,
            "temperature": self.config.temperature,
            "messages": [
                {"role": "system", "content": bundle.system_text},
                {"role": "user", "content": bundle.user_text},
            ],
        });
        let mut req = self
            .agent
            .post(endpoint)
            .set("content-type", "application/json");
        if let Ok(key) = std::env::var(&self.config.api_key_env) {
            if !key.is_empty() {
                req = req.set("authorization", &format!("Bearer {key}"));
            }
        }
        let resp = req
            .send_string(&payload.to_string())
            .map_err(|e| format!("transport: {e}"))?;
        let body = resp
            .into_string()
            .map_err(|e| format!("transport: {e}"))?;
        let v: serde_json::Value =
            serde_json::from_str(&body).map_err(|e| format!("bad completion envelope: {e}"))?;
        let content = v
            .pointer("/choices/0/message/content")
            .and_then(|c| c.as_str())
            .ok_or_else(|| "bad completion envelope: no choices[0].message.content".to_string())?;
        parse_score(content).map_err(|e| e.to_string())
    }
}

impl Scorer for RemoteScorer {
    fn id(&self) -> &str {
        "remote"
    }

    fn score(&self, bundle: &PromptBundle) -> ScoreRecord {
        let mut record = ScoreRecord {
            slice_ref: bundle.slice_ref.clone(),
            scorer_id: self.id().to_string(),
            latency_ms: 0,
            scores: None,
            unscored: None,
        };
        let Some(endpoint) = self.config.endpoint_url.clone() else {
            record.unscored = Some("no endpoint_url configured".to_string());
            return record;
        };
        let attempts = self.config.retries.max(1);
        let started = Instant::now();
        let mut last_err = String::new();
        for attempt in 1..=attempts {
            match self.attempt(&endpoint, bundle) {
                Ok(scores) => {
                    record.scores = Some(scores);
                    record.latency_ms = started.elapsed().as_millis() as u64;
                    return record;
                }
                Err(e) => {
                    last_err = e;
                    if attempt < attempts {
                        let backoff = Duration::from_millis(
                            (50u64 << (attempt - 1).min(5)).min(1_000),
                        );
                        std::thread::sleep(backoff);
                    }
                }
            }
        }
        record.latency_ms = started.elapsed().as_millis() as u64;
        record.unscored = Some(format!("retries exhausted after {attempts} attempts: {last_err}"));
        record
    }
}

/// Score every bundle in order with one scorer.  Output order equals input
/// order regardless of scorer internals.
pub fn score_all(scorer: &dyn Scorer, bundles: &[PromptBundle]) -> Vec<ScoreRecord> {
    bundles.iter().map(|b| scorer.score(b)).collect()
}

/// Build a recorded-response fixture map for the given slices: each request
/// fingerprint maps to `response`.
pub fn record_fixture(
    slices: &[Slice],
    template: &str,
    response_for: impl Fn(&Slice) -> String,
) -> Result<BTreeMap<String, String>, PromptError> {
    let mut map = BTreeMap::new();
    for s in slices {
        let bundle = build_prompt(s, template)?;
        map.insert(request_fingerprint(&bundle), response_for(s));
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin_catalog;
    use crate::slicer::SliceStrategy;
    use std::io::{Read as _, Write as _};

    fn slice_with_snippet(snippet: &str) -> Slice {
        Slice {
            package: "pkg".to_string(),
            strategy: SliceStrategy::Static,
            index: 0,
            node_ids: vec![],
            lines: Default::default(),
            snippet: snippet.to_string(),
            source_anchor: None,
            sink_anchor: None,
            budget_exhausted: false,
            snippet_truncated: false,
            token_range: None,
        }
    }

    const LISTING2: &str = "{\n\"confidence\": 0.95,\n\"obfuscated\": 0.00,\n\"malware\": 0.90,\n\"securityRisk\": 0.95\n}";

    #[test]
    fn parse_canonical_verdict() {
        let s = parse_score(LISTING2).unwrap();
        assert_eq!(s.confidence, 0.95);
        assert_eq!(s.obfuscated, 0.0);
        assert_eq!(s.malware, 0.90);
        assert_eq!(s.security_risk, 0.95);
    }

    #[test]
    fn parse_tolerates_whitespace_and_one_fence() {
        let fenced = format!("\n\n```json\n{LISTING2}\n```\n");
        assert!(parse_score(&fenced).is_ok());
        let plain_fence = format!("```\n{LISTING2}\n```");
        assert!(parse_score(&plain_fence).is_ok());
    }

    #[test]
    fn parse_rejects_prose() {
        assert_eq!(parse_score("safe"), Err(ParseError::NotJson));
        assert_eq!(parse_score(""), Err(ParseError::NotJson));
        assert!(matches!(
            parse_score(&format!("The verdict is {LISTING2}")),
            Err(ParseError::NotJson)
        ));
        assert!(matches!(
            parse_score(&format!("{LISTING2} trailing words")),
            Err(ParseError::NotJson)
        ));
    }

    #[test]
    fn parse_rejects_two_objects() {
        assert_eq!(
            parse_score(&format!("{LISTING2}\n{LISTING2}")),
            Err(ParseError::MultipleObjects)
        );
    }

    #[test]
    fn parse_rejects_missing_and_extra_keys() {
        assert_eq!(
            parse_score(r#"{"confidence":0.5,"obfuscated":0,"malware":0.1}"#),
            Err(ParseError::MissingKey("securityRisk".to_string()))
        );
        assert_eq!(
            parse_score(
                r#"{"confidence":0.5,"obfuscated":0,"malware":0.1,"securityRisk":0,"verdict":"bad"}"#
            ),
            Err(ParseError::UnexpectedKey("verdict".to_string()))
        );
    }

    #[test]
    fn parse_rejects_out_of_range() {
        match parse_score(r#"{"confidence":0.5,"obfuscated":0,"malware":1.5,"securityRisk":0}"#) {
            Err(ParseError::OutOfRange { key, .. }) => assert_eq!(key, "malware"),
            other => panic!("expected OutOfRange, got {other:?}"),
        }
        match parse_score(
            r#"{"confidence":"high","obfuscated":0,"malware":0,"securityRisk":0}"#,
        ) {
            Err(ParseError::OutOfRange { key, .. }) => assert_eq!(key, "confidence"),
            other => panic!("expected OutOfRange, got {other:?}"),
        }
    }

    #[test]
    fn parse_serialize_roundtrip() {
        for s in [
            Scores { confidence: 0.0, obfuscated: 0.0, malware: 0.0, security_risk: 0.0 },
            Scores { confidence: 1.0, obfuscated: 0.5, malware: 0.25, security_risk: 1.0 },
            Scores { confidence: 0.95, obfuscated: 0.0, malware: 0.9, security_risk: 0.95 },
        ] {
            let json = serde_json::to_string(&s).unwrap();
            assert_eq!(parse_score(&json).unwrap(), s);
        }
    }

    #[test]
    fn build_prompt_splits_on_placeholder() {
        let slice = slice_with_snippet("exec(x);\n");
        let bundle = build_prompt(&slice, BUILTIN_TEMPLATE).unwrap();
        assert_eq!(bundle.user_text, "exec(x);\n");
        assert!(bundle.system_text.contains("professional static security code auditor"));
        assert!(bundle.system_text.contains("Example 2 - Benign"));
        assert!(!bundle.system_text.contains(SNIPPET_PLACEHOLDER));
        assert_eq!(bundle.slice_ref, "pkg/static/0");
    }

    #[test]
    fn build_prompt_requires_exactly_one_placeholder() {
        let slice = slice_with_snippet("x");
        assert_eq!(
            build_prompt(&slice, "no placeholder here"),
            Err(PromptError::TemplateMissingPlaceholder)
        );
        assert_eq!(
            build_prompt(&slice, "{{SNIPPET}} and {{SNIPPET}}"),
            Err(PromptError::TemplateMultiplePlaceholders)
        );
    }

    #[test]
    fn custom_template_passes_through_verbatim() {
        let slice = slice_with_snippet("code here");
        let bundle = build_prompt(&slice, "PREFIX {{SNIPPET}} SUFFIX").unwrap();
        assert_eq!(bundle.system_text, "PREFIX  SUFFIX");
        assert_eq!(bundle.user_text, "code here");
    }

    #[test]
    fn stub_formula_cases() {
        let catalog = builtin_catalog();
        // Sink + source co-occurring: 0.45 + 0.35 + 0.20 = 1.00.
        let r = score_stub(
            &slice_with_snippet("const h = process.env.HOME;\nexec(h);\n"),
            &catalog,
        );
        let s = r.scores.unwrap();
        assert_eq!(s.malware, 1.0);
        assert_eq!(s.confidence, 0.9);
        // Neither source nor sink.
        let r = score_stub(&slice_with_snippet("let total = 1 + 2;\n"), &catalog);
        let s = r.scores.unwrap();
        assert_eq!(s.malware, 0.0);
        assert_eq!(s.confidence, 0.3);
        // Sink only.
        let r = score_stub(&slice_with_snippet("exec('ls');\n"), &catalog);
        assert_eq!(r.scores.unwrap().malware, 0.45);
    }

    #[test]
    fn stub_obfuscation_term() {
        let catalog = builtin_catalog();
        let blob = "aGVsbG8gd29ybGQgdGhpcyBpcyBsb25n";
        let r = score_stub(
            &slice_with_snippet(&format!("const payload = \"{blob}\";\n")),
            &catalog,
        );
        let s = r.scores.unwrap();
        assert_eq!(s.obfuscated, 0.9);
        assert_eq!(s.security_risk, 0.45);
        assert_eq!(s.confidence, 0.9);
        // A long camelCase identifier is not a literal.
        let r = score_stub(
            &slice_with_snippet("const aVeryLongCamelCaseIdentifierName = 1;\n"),
            &catalog,
        );
        assert_eq!(r.scores.unwrap().obfuscated, 0.0);
    }

    #[test]
    fn stub_is_pure() {
        let catalog = builtin_catalog();
        let slice = slice_with_snippet("const h = os.hostname();\nexec(h);\n");
        let a = score_stub(&slice, &catalog);
        let b = score_stub(&slice, &catalog);
        assert_eq!(a, b);
        assert_eq!(a.latency_ms, 0);
    }

    #[test]
    fn recorded_scorer_replays_and_reports_misses() {
        let slice = slice_with_snippet("client.connect(1, 'h');\n");
        let bundle = build_prompt(&slice, BUILTIN_TEMPLATE).unwrap();
        let key = request_fingerprint(&bundle);
        let scorer =
            RecordedScorer::new([(key, LISTING2.to_string())].into_iter().collect());
        let r = scorer.score(&bundle);
        assert_eq!(r.scores.unwrap().malware, 0.90);
        assert_eq!(r.latency_ms, 0);

        let other = build_prompt(&slice_with_snippet("different"), BUILTIN_TEMPLATE).unwrap();
        let miss = scorer.score(&other);
        assert!(miss.scores.is_none());
        assert!(miss.unscored.unwrap().contains("no recorded response"));
    }

    #[test]
    fn unscored_records_carry_reason_not_zeros() {
        let scorer = RecordedScorer::new(Default::default());
        let bundle = build_prompt(&slice_with_snippet("x"), BUILTIN_TEMPLATE).unwrap();
        let r = scorer.score(&bundle);
        assert!(!r.is_scored());
        assert!(r.unscored.is_some());
        let json = serde_json::to_string(&r).unwrap();
        assert!(!json.contains("malware"));
    }

    /// Minimal scripted HTTP server: answers each connection with the next
    /// (status, body) pair.
    fn fake_endpoint(script: Vec<(u16, String)>) -> (String, std::thread::JoinHandle<usize>) {
        let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let handle = std::thread::spawn(move || {
            let mut served = 0;
            for (status, body) in script {
                let (mut stream, _) = listener.accept().unwrap();
                let mut buf = Vec::new();
                let mut byte = [0u8; 1];
                // Read until end of headers.
                while !buf.ends_with(b"\r\n\r\n") {
                    if stream.read(&mut byte).unwrap_or(0) == 0 {
                        break;
                    }
                    buf.push(byte[0]);
                }
                let header_text = String::from_utf8_lossy(&buf).to_string();
                let content_length = header_text
                    .lines()
                    .find_map(|l| {
                        let (k, v) = l.split_once(':')?;
                        k.eq_ignore_ascii_case("content-length")
                            .then(|| v.trim().parse::<usize>().ok())?
                    })
                    .unwrap_or(0);
                let mut body_buf = vec![0u8; content_length];
                stream.read_exact(&mut body_buf).unwrap();
                let reason = if status == 200 { "OK" } else { "Error" };
                let resp = format!(
                    "HTTP/1.1 {status} {reason}\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
                    body.len()
                );
                stream.write_all(resp.as_bytes()).unwrap();
                served += 1;
            }
            served
        });
        (format!("http://{addr}"), handle)
    }

    fn completion_envelope(content: &str) -> String {
        serde_json::json!({
            "choices": [{"message": {"role": "assistant", "content": content}}]
        })
        .to_string()
    }

    #[test]
    fn remote_scorer_retries_then_succeeds() {
        let (url, handle) = fake_endpoint(vec![
            (500, "{}".to_string()),
            (500, "{}".to_string()),
            (200, completion_envelope(LISTING2)),
        ]);
        let config = ScorerConfig {
            endpoint_url: Some(url),
            retries: 3,
            request_timeout: Duration::from_secs(5),
            ..Default::default()
        };
        let scorer = RemoteScorer::new(config);
        let bundle = build_prompt(&slice_with_snippet("exec(x)"), BUILTIN_TEMPLATE).unwrap();
        let r = scorer.score(&bundle);
        assert_eq!(r.scores.unwrap().malware, 0.90);
        assert_eq!(handle.join().unwrap(), 3);
    }

    #[test]
    fn remote_scorer_retries_on_malformed_verdict() {
        let (url, handle) = fake_endpoint(vec![
            (200, completion_envelope("the code looks bad")),
            (200, completion_envelope(LISTING2)),
        ]);
        let config = ScorerConfig {
            endpoint_url: Some(url),
            retries: 2,
            request_timeout: Duration::from_secs(5),
            ..Default::default()
        };
        let scorer = RemoteScorer::new(config);
        let bundle = build_prompt(&slice_with_snippet("exec(x)"), BUILTIN_TEMPLATE).unwrap();
        let r = scorer.score(&bundle);
        assert!(r.is_scored());
        assert_eq!(handle.join().unwrap(), 2);
    }

    #[test]
    fn remote_scorer_exhausts_retries() {
        let (url, handle) = fake_endpoint(vec![
            (500, "{}".to_string()),
            (500, "{}".to_string()),
        ]);
        let config = ScorerConfig {
            endpoint_url: Some(url),
            retries: 2,
            request_timeout: Duration::from_secs(5),
            ..Default::default()
        };
        let scorer = RemoteScorer::new(config);
        let bundle = build_prompt(&slice_with_snippet("exec(x)"), BUILTIN_TEMPLATE).unwrap();
        let r = scorer.score(&bundle);
        assert!(!r.is_scored());
        let reason = r.unscored.unwrap();
        assert!(reason.contains("retries exhausted after 2 attempts"), "{reason}");
        assert_eq!(handle.join().unwrap(), 2);
    }

    #[test]
    fn score_record_json_shape() {
        let r = ScoreRecord {
            slice_ref: "p/static/0".to_string(),
            scorer_id: "stub".to_string(),
            latency_ms: 0,
            scores: Some(Scores {
                confidence: 0.9,
                obfuscated: 0.0,
                malware: 0.45,
                security_risk: 0.45,
            }),
            unscored: None,
        };
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"securityRisk\":0.45"));
        let back: ScoreRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}
