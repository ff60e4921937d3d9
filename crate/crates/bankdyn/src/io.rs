//! Text formats: the model description language, the interaction config
//! format, and numeric CSV.
//!
//! The model language is line oriented. `#` starts a comment anywhere,
//! blank lines are ignored, and every diagnostic carries the 1-based
//! line and column of the offending token:
//!
//! ```text
//! model retail
//! state new init 100
//! state open init 0
//! transition new open rate 0.8
//! source new rate 2.5
//! ```
//!
//! Name resolution happens while reading: a line that references an
//! undeclared state fails immediately, even in a document that is
//! missing its `model` header. Serialization is canonical, so any
//! document has exactly one serialized form: states in declaration
//! order, transitions sorted by source then target, the source line
//! last and only when the rate is positive.

use crate::kolmogorov::Trajectory;
use crate::model::{InteractionConfig, Matrix, SideParams, StateGraph, Transition};
use std::fmt::Write as _;
use thiserror::Error;

/// Whether a parse failure is structural or a name/value resolution
/// problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    Semantic,
}

/// A parse failure, located at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
    pub message: String,
}

impl ParseError {
    fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self { line, column, kind: ParseErrorKind::Syntax, message: message.into() }
    }

    fn semantic(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self { line, column, kind: ParseErrorKind::Semantic, message: message.into() }
    }
}

/// A parsed model document: the graph plus the source lines of each
/// declaration, for diagnostics that point back into the text.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelDocument {
    pub name: String,
    pub graph: StateGraph,
    state_lines: Vec<usize>,
    transition_lines: Vec<usize>,
    source_line: Option<usize>,
}

impl ModelDocument {
    /// Line that declared state `index`.
    pub fn state_line(&self, index: usize) -> Option<usize> {
        self.state_lines.get(index).copied()
    }

    /// Line that declared transition `index` (in graph order).
    pub fn transition_line(&self, index: usize) -> Option<usize> {
        self.transition_lines.get(index).copied()
    }

    /// Line of the source declaration, if present.
    pub fn source_line(&self) -> Option<usize> {
        self.source_line
    }
}

fn is_identifier(token: &str) -> bool {
    let mut chars = token.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '-')
}

/// Tokens of a line with the 1-based column of each token's first byte.
fn tokenize(line: &str) -> Vec<(usize, &str)> {
    let mut tokens = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                tokens.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        tokens.push((s + 1, &line[s..]));
    }
    tokens
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn parse_number(line_no: usize, column: usize, token: &str) -> Result<f64, ParseError> {
    let value: f64 = token
        .parse()
        .map_err(|_| ParseError::syntax(line_no, column, format!("invalid number '{token}'")))?;
    if !value.is_finite() {
        return Err(ParseError::syntax(
            line_no,
            column,
            format!("expected a finite number, got '{token}'"),
        ));
    }
    Ok(value)
}

fn expect_identifier(line_no: usize, token: (usize, &str)) -> Result<String, ParseError> {
    if is_identifier(token.1) {
        Ok(token.1.to_string())
    } else {
        Err(ParseError::syntax(line_no, token.0, format!("invalid identifier '{}'", token.1)))
    }
}

fn expect_keyword(line_no: usize, token: (usize, &str), keyword: &str) -> Result<(), ParseError> {
    if token.1 == keyword {
        Ok(())
    } else {
        Err(ParseError::syntax(
            line_no,
            token.0,
            format!("expected '{keyword}', got '{}'", token.1),
        ))
    }
}

fn take<'a>(
    line_no: usize,
    line_len: usize,
    tokens: &[(usize, &'a str)],
    index: usize,
    what: &str,
) -> Result<(usize, &'a str), ParseError> {
    tokens.get(index).copied().ok_or_else(|| {
        ParseError::syntax(line_no, line_len + 1, format!("expected {what}"))
    })
}

fn no_extra(line_no: usize, tokens: &[(usize, &str)], expected: usize) -> Result<(), ParseError> {
    match tokens.get(expected) {
        Some(&(col, tok)) => {
            Err(ParseError::syntax(line_no, col, format!("unexpected token '{tok}'")))
        }
        None => Ok(()),
    }
}

fn lookup_state(
    states: &[String],
    line_no: usize,
    token: (usize, &str),
) -> Result<usize, ParseError> {
    states.iter().position(|s| s == token.1).ok_or_else(|| {
        ParseError::semantic(line_no, token.0, format!("undeclared state '{}'", token.1))
    })
}

/// Parses a model document. Errors point at the first offending token;
/// a missing `model` header is only reported once the whole input has
/// been read without one, at line 1, column 1.
pub fn parse_model(input: &str) -> Result<ModelDocument, ParseError> {
    let mut name: Option<String> = None;
    let mut states: Vec<String> = Vec::new();
    let mut initial_levels: Vec<f64> = Vec::new();
    let mut transitions: Vec<Transition> = Vec::new();
    let mut source_rate = 0.0_f64;
    let mut state_lines: Vec<usize> = Vec::new();
    let mut transition_lines: Vec<usize> = Vec::new();
    let mut source_line: Option<usize> = None;

    for (idx, raw_line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw_line);
        let tokens = tokenize(line);
        if tokens.is_empty() {
            continue;
        }
        let line_len = line.trim_end().len();

        match tokens[0].1 {
            "model" => {
                let ident = take(line_no, line_len, &tokens, 1, "a model name")?;
                let model_name = expect_identifier(line_no, ident)?;
                no_extra(line_no, &tokens, 2)?;
                if name.is_some() {
                    return Err(ParseError::semantic(
                        line_no,
                        tokens[0].0,
                        "duplicate model header",
                    ));
                }
                name = Some(model_name);
            }
            "state" => {
                let ident = take(line_no, line_len, &tokens, 1, "a state name")?;
                let state_name = expect_identifier(line_no, ident)?;
                expect_keyword(line_no, take(line_no, line_len, &tokens, 2, "'init'")?, "init")?;
                let num = take(line_no, line_len, &tokens, 3, "an initial level")?;
                let level = parse_number(line_no, num.0, num.1)?;
                no_extra(line_no, &tokens, 4)?;
                if states.contains(&state_name) {
                    return Err(ParseError::semantic(
                        line_no,
                        ident.0,
                        format!("duplicate state '{state_name}'"),
                    ));
                }
                states.push(state_name);
                initial_levels.push(level);
                state_lines.push(line_no);
            }
            "transition" => {
                let from_tok = take(line_no, line_len, &tokens, 1, "a source state")?;
                expect_identifier(line_no, from_tok)?;
                let to_tok = take(line_no, line_len, &tokens, 2, "a target state")?;
                expect_identifier(line_no, to_tok)?;
                expect_keyword(line_no, take(line_no, line_len, &tokens, 3, "'rate'")?, "rate")?;
                let num = take(line_no, line_len, &tokens, 4, "a rate")?;
                let rate = parse_number(line_no, num.0, num.1)?;
                no_extra(line_no, &tokens, 5)?;
                let from = lookup_state(&states, line_no, from_tok)?;
                let to = lookup_state(&states, line_no, to_tok)?;
                transitions.push(Transition::new(from, to, rate));
                transition_lines.push(line_no);
            }
            "source" => {
                let ident = take(line_no, line_len, &tokens, 1, "a state name")?;
                expect_identifier(line_no, ident)?;
                expect_keyword(line_no, take(line_no, line_len, &tokens, 2, "'rate'")?, "rate")?;
                let num = take(line_no, line_len, &tokens, 3, "a rate")?;
                let rate = parse_number(line_no, num.0, num.1)?;
                no_extra(line_no, &tokens, 4)?;
                let state = lookup_state(&states, line_no, ident)?;
                if state != 0 {
                    return Err(ParseError::semantic(
                        line_no,
                        ident.0,
                        format!(
                            "source must feed the first declared state '{}'",
                            states[0]
                        ),
                    ));
                }
                if source_line.is_some() {
                    return Err(ParseError::semantic(
                        line_no,
                        tokens[0].0,
                        "duplicate source declaration",
                    ));
                }
                source_rate = rate;
                source_line = Some(line_no);
            }
            other => {
                return Err(ParseError::syntax(
                    line_no,
                    tokens[0].0,
                    format!("unknown directive '{other}'"),
                ));
            }
        }
    }

    let name = name.ok_or_else(|| ParseError::semantic(1, 1, "missing model header"))?;
    Ok(ModelDocument {
        name,
        graph: StateGraph::new(states, initial_levels, transitions, source_rate),
        state_lines,
        transition_lines,
        source_line,
    })
}

/// Canonical serialization of a graph. Parsing the result reproduces the
/// graph with transitions in sorted order; serializing again is a fixed
/// point, so canonical text can be compared byte for byte.
pub fn serialize_model(name: &str, graph: &StateGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "model {name}");
    for (i, state) in graph.states.iter().enumerate() {
        let _ = writeln!(out, "state {state} init {}", graph.initial_levels[i]);
    }
    let mut order: Vec<usize> = (0..graph.transitions.len()).collect();
    order.sort_by_key(|&i| (graph.transitions[i].from, graph.transitions[i].to));
    for i in order {
        let t = &graph.transitions[i];
        let _ = writeln!(
            out,
            "transition {} {} rate {}",
            graph.states[t.from], graph.states[t.to], t.rate
        );
    }
    if graph.source_rate > 0.0 {
        let _ = writeln!(out, "source {} rate {}", graph.states[0], graph.source_rate);
    }
    out
}

/// The ten interaction config keys, in canonical order.
const INTERACTION_KEYS: [&str; 10] = [
    "p_B", "p_C", "lambda_B", "lambda_C", "tau_B", "tau_C", "delta_B", "delta_C", "N_B", "N_C",
];

/// Parses the interaction config format: one `key = value` pair per
/// line, `#` comments, and exactly the ten keys `p_B p_C lambda_B
/// lambda_C tau_B tau_C delta_B delta_C N_B N_C`, each once. Range
/// violations fail on the offending line.
pub fn parse_interaction(input: &str) -> Result<InteractionConfig, ParseError> {
    let mut values = [f64::NAN; 10];
    let mut seen = [false; 10];

    for (idx, raw_line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw_line);
        if line.trim().is_empty() {
            continue;
        }
        let eq = line.find('=').ok_or_else(|| {
            ParseError::syntax(
                line_no,
                line.len() - line.trim_start().len() + 1,
                "expected 'key = value'",
            )
        })?;
        let key_part = &line[..eq];
        let value_part = &line[eq + 1..];
        let key = key_part.trim();
        let key_col = key_part.len() - key_part.trim_start().len() + 1;
        if key.is_empty() {
            return Err(ParseError::syntax(line_no, key_col, "missing key before '='"));
        }
        let value_col = eq + 1 + (value_part.len() - value_part.trim_start().len()) + 1;
        let value_tok = value_part.trim();
        if value_tok.is_empty() {
            return Err(ParseError::syntax(line_no, value_col, "missing value after '='"));
        }

        let slot = INTERACTION_KEYS.iter().position(|&k| k == key).ok_or_else(|| {
            ParseError::semantic(line_no, key_col, format!("unknown key '{key}'"))
        })?;
        if seen[slot] {
            return Err(ParseError::semantic(
                line_no,
                key_col,
                format!("duplicate key '{key}'"),
            ));
        }
        let value = parse_number(line_no, value_col, value_tok)?;

        let range_error = |message: String| ParseError::semantic(line_no, value_col, message);
        match key {
            "p_B" | "p_C" => {
                if !(0.0..=1.0).contains(&value) {
                    return Err(range_error(format!("{key} must be in [0, 1], got {value}")));
                }
            }
            "N_B" | "N_C" => {
                if value <= 0.0 {
                    return Err(range_error(format!("{key} must be positive, got {value}")));
                }
            }
            _ => {
                if value < 0.0 {
                    return Err(range_error(format!("{key} must be nonnegative, got {value}")));
                }
            }
        }
        values[slot] = value;
        seen[slot] = true;
    }

    if seen.iter().any(|&s| !s) {
        let missing: Vec<&str> = INTERACTION_KEYS
            .iter()
            .zip(seen.iter())
            .filter(|(_, &s)| !s)
            .map(|(&k, _)| k)
            .collect();
        return Err(ParseError::semantic(
            1,
            1,
            format!("missing key(s): {}", missing.join(", ")),
        ));
    }

    Ok(InteractionConfig {
        bank: SideParams {
            success_probability: values[0],
            productivity: values[2],
            operation_time: values[4],
            attention_delay: values[6],
            initial_pool: values[8],
        },
        client: SideParams {
            success_probability: values[1],
            productivity: values[3],
            operation_time: values[5],
            attention_delay: values[7],
            initial_pool: values[9],
        },
    })
}

/// Parses comma-separated numbers into a matrix. Blank lines and `#`
/// comment lines are skipped, fields are trimmed (including `\r`), rows
/// must all have the same width, and every value must be finite.
pub fn parse_matrix_csv(input: &str) -> Result<Matrix, ParseError> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    let mut first_row_line = 0usize;

    for (idx, raw_line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim_end_matches('\r');
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut row = Vec::new();
        let mut col = 1usize;
        for field in line.split(',') {
            let leading = field.len() - field.trim_start().len();
            let tok = field.trim();
            if tok.is_empty() {
                return Err(ParseError::syntax(line_no, col + leading, "empty field"));
            }
            row.push(parse_number(line_no, col + leading, tok)?);
            col += field.len() + 1;
        }
        match width {
            None => {
                width = Some(row.len());
                first_row_line = line_no;
            }
            Some(w) if w != row.len() => {
                return Err(ParseError::semantic(
                    line_no,
                    1,
                    format!(
                        "row has {} values, expected {} (as on line {})",
                        row.len(),
                        w,
                        first_row_line
                    ),
                ));
            }
            Some(_) => {}
        }
        rows.push(row);
    }

    if rows.is_empty() {
        return Err(ParseError::semantic(1, 1, "no data rows"));
    }
    Ok(Matrix::from_rows(&rows).expect("rows checked for equal width"))
}

/// Renders a sampled table as CSV: header `t,<columns...>`, one row per
/// time, LF line endings, and shortest round-trip decimal formatting.
pub fn table_csv(times: &[f64], columns: &[String], values: &[f64]) -> String {
    assert_eq!(values.len(), times.len() * columns.len(), "table shape mismatch");
    let mut out = String::new();
    out.push('t');
    for c in columns {
        out.push(',');
        out.push_str(c);
    }
    out.push('\n');
    for (k, &t) in times.iter().enumerate() {
        let _ = write!(out, "{t}");
        for j in 0..columns.len() {
            let _ = write!(out, ",{}", values[k * columns.len() + j]);
        }
        out.push('\n');
    }
    out
}

/// [`table_csv`] for a trajectory with named state columns.
pub fn trajectory_csv(trajectory: &Trajectory, columns: &[String]) -> String {
    table_csv(&trajectory.times, columns, &trajectory.levels)
}

#[cfg(test)]
mod tests {
    use super::*;

    const RETAIL: &str = "\
model retail
state new init 100
state open init 0
transition new open rate 0.8
source new rate 2.5
";

    #[test]
    fn parses_and_serializes_canonically() {
        let doc = parse_model(RETAIL).unwrap();
        assert_eq!(doc.name, "retail");
        assert_eq!(doc.graph.states, vec!["new", "open"]);
        assert_eq!(doc.graph.initial_levels, vec![100.0, 0.0]);
        assert_eq!(doc.graph.transitions, vec![Transition::new(0, 1, 0.8)]);
        assert_eq!(doc.graph.source_rate, 2.5);
        assert_eq!(doc.state_line(0), Some(2));
        assert_eq!(doc.transition_line(0), Some(4));
        assert_eq!(doc.source_line(), Some(5));
        assert_eq!(serialize_model(&doc.name, &doc.graph), RETAIL);
    }

    #[test]
    fn comments_and_blank_lines_keep_line_numbers() {
        let text = "# a model\n\nmodel m\nstate a init 1 # trailing\n\ntransition a b rate 1\n";
        let err = parse_model(text).unwrap_err();
        assert_eq!(err.line, 6);
        assert_eq!(err.kind, ParseErrorKind::Semantic);
        assert!(err.message.contains("undeclared state 'b'"));
        assert_eq!(err.column, 14);
    }

    #[test]
    fn undeclared_state_fires_before_missing_header() {
        let err = parse_model("transition A B rate 1\n").unwrap_err();
        assert_eq!((err.line, err.column), (1, 12));
        assert_eq!(err.kind, ParseErrorKind::Semantic);
        assert!(err.message.contains("undeclared state 'A'"));
    }

    #[test]
    fn missing_header_is_reported_at_the_top() {
        let err = parse_model("state a init 1\n").unwrap_err();
        assert_eq!((err.line, err.column), (1, 1));
        assert_eq!(err.kind, ParseErrorKind::Semantic);
        assert_eq!(err.message, "missing model header");
    }

    #[test]
    fn duplicate_declarations_are_semantic_errors() {
        let err = parse_model("model m\nstate a init 1\nstate a init 2\n").unwrap_err();
        assert_eq!((err.line, err.kind), (3, ParseErrorKind::Semantic));
        assert!(err.message.contains("duplicate state 'a'"));

        let err = parse_model("model m\nmodel n\n").unwrap_err();
        assert_eq!((err.line, err.kind), (2, ParseErrorKind::Semantic));

        let err =
            parse_model("model m\nstate a init 1\nsource a rate 1\nsource a rate 2\n").unwrap_err();
        assert_eq!((err.line, err.kind), (4, ParseErrorKind::Semantic));
    }

    #[test]
    fn source_must_feed_the_first_state() {
        let err = parse_model("model m\nstate a init 1\nstate b init 0\nsource b rate 1\n")
            .unwrap_err();
        assert_eq!((err.line, err.column), (4, 8));
        assert_eq!(err.kind, ParseErrorKind::Semantic);
        assert!(err.message.contains("first declared state 'a'"));
    }

    #[test]
    fn syntax_errors_locate_the_offending_token() {
        let err = parse_model("model m\nstatus a init 1\n").unwrap_err();
        assert_eq!((err.line, err.column, err.kind), (2, 1, ParseErrorKind::Syntax));

        let err = parse_model("model m\nstate a start 1\n").unwrap_err();
        assert_eq!((err.line, err.column), (2, 9));
        assert!(err.message.contains("expected 'init'"));

        let err = parse_model("model m\nstate a init x\n").unwrap_err();
        assert_eq!((err.line, err.column), (2, 14));
        assert!(err.message.contains("invalid number 'x'"));

        let err = parse_model("model m\nstate a init 1e999\n").unwrap_err();
        assert!(err.message.contains("finite"));

        let err = parse_model("model m\nstate a\n").unwrap_err();
        assert_eq!((err.line, err.column), (2, 8));
        assert!(err.message.contains("expected 'init'"));

        let err = parse_model("model m\nstate a init 1 extra\n").unwrap_err();
        assert_eq!((err.line, err.column), (2, 16));
        assert!(err.message.contains("unexpected token 'extra'"));

        let err = parse_model("model m\nstate 9a init 1\n").unwrap_err();
        assert!(err.message.contains("invalid identifier '9a'"));
    }

    #[test]
    fn serialization_is_canonical_and_idempotent() {
        let text = "model m\nstate b init 1\nstate a init 2\ntransition a b rate 3\ntransition b a rate 0.25\n";
        let doc = parse_model(text).unwrap();
        let canonical = serialize_model(&doc.name, &doc.graph);
        // States keep declaration order; transitions sort by index pair.
        assert_eq!(
            canonical,
            "model m\nstate b init 1\nstate a init 2\ntransition b a rate 0.25\ntransition a b rate 3\n"
        );
        let reparsed = parse_model(&canonical).unwrap();
        assert_eq!(serialize_model(&reparsed.name, &reparsed.graph), canonical);
        // Same graph up to transition order, which canonical text sorts.
        assert_eq!(reparsed.graph.states, doc.graph.states);
        assert_eq!(reparsed.graph.initial_levels, doc.graph.initial_levels);
        let mut original = doc.graph.transitions.clone();
        original.sort_by_key(|t| (t.from, t.to));
        assert_eq!(reparsed.graph.transitions, original);
    }

    #[test]
    fn zero_source_is_omitted_from_serialization() {
        let doc = parse_model("model m\nstate a init 1\n").unwrap();
        assert_eq!(serialize_model(&doc.name, &doc.graph), "model m\nstate a init 1\n");
    }

    #[test]
    fn interaction_config_round_trips_values() {
        let text = "\
# interaction parameters
p_B = 0.3
p_C = 0.6
lambda_B = 0.8
lambda_C = 0.4
tau_B = 0.5
tau_C = 0.7
delta_B = 0.2
delta_C = 0.3
N_B = 12
N_C = 30
";
        let cfg = parse_interaction(text).unwrap();
        assert_eq!(cfg.bank.success_probability, 0.3);
        assert_eq!(cfg.bank.productivity, 0.8);
        assert_eq!(cfg.bank.operation_time, 0.5);
        assert_eq!(cfg.bank.attention_delay, 0.2);
        assert_eq!(cfg.bank.initial_pool, 12.0);
        assert_eq!(cfg.client.success_probability, 0.6);
        assert_eq!(cfg.client.productivity, 0.4);
        assert_eq!(cfg.client.operation_time, 0.7);
        assert_eq!(cfg.client.attention_delay, 0.3);
        assert_eq!(cfg.client.initial_pool, 30.0);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn interaction_config_accepts_tight_spacing() {
        let text = "p_B=0.3\np_C=0.6\nlambda_B=0.8\nlambda_C=0.4\ntau_B=0.5\ntau_C=0.7\ndelta_B=0.2\ndelta_C=0.3\nN_B=12\nN_C=30\n";
        assert!(parse_interaction(text).is_ok());
    }

    #[test]
    fn interaction_config_errors() {
        let err = parse_interaction("p_Q = 0.5\n").unwrap_err();
        assert_eq!((err.line, err.column, err.kind), (1, 1, ParseErrorKind::Semantic));
        assert!(err.message.contains("unknown key 'p_Q'"));

        let err = parse_interaction("p_B = 0.5\np_B = 0.6\n").unwrap_err();
        assert_eq!((err.line, err.kind), (2, ParseErrorKind::Semantic));
        assert!(err.message.contains("duplicate key"));

        let err = parse_interaction("p_B = 1.5\n").unwrap_err();
        assert_eq!((err.line, err.column, err.kind), (1, 7, ParseErrorKind::Semantic));
        assert!(err.message.contains("must be in [0, 1]"));

        let err = parse_interaction("N_B = 0\n").unwrap_err();
        assert!(err.message.contains("must be positive"));

        let err = parse_interaction("tau_B = -1\n").unwrap_err();
        assert!(err.message.contains("must be nonnegative"));

        let err = parse_interaction("p_B 0.5\n").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Syntax);
        assert!(err.message.contains("expected 'key = value'"));

        let err = parse_interaction("p_B = 0.5\n").unwrap_err();
        assert_eq!((err.line, err.column, err.kind), (1, 1, ParseErrorKind::Semantic));
        assert!(err.message.starts_with("missing key(s): p_C, lambda_B"));

        let err = parse_interaction("p_B = oops\n").unwrap_err();
        assert_eq!((err.line, err.column, err.kind), (1, 7, ParseErrorKind::Syntax));
    }

    #[test]
    fn csv_parses_with_comments_and_crlf() {
        let text = "# delays\r\n1.0, 2.0, 3.5\r\n\r\n4,5,6\r\n";
        let m = parse_matrix_csv(text).unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 3));
        assert_eq!(m.get(0, 2), 3.5);
        assert_eq!(m.get(1, 0), 4.0);
    }

    #[test]
    fn csv_rejects_ragged_and_bad_fields() {
        let err = parse_matrix_csv("1,2\n3\n").unwrap_err();
        assert_eq!((err.line, err.kind), (2, ParseErrorKind::Semantic));
        assert!(err.message.contains("row has 1 values, expected 2"));

        let err = parse_matrix_csv("1, x\n").unwrap_err();
        assert_eq!((err.line, err.column, err.kind), (1, 4, ParseErrorKind::Syntax));

        let err = parse_matrix_csv("1,,2\n").unwrap_err();
        assert!(err.message.contains("empty field"));

        let err = parse_matrix_csv("# only a comment\n").unwrap_err();
        assert_eq!(err.message, "no data rows");

        let err = parse_matrix_csv("1,inf\n").unwrap_err();
        assert!(err.message.contains("finite"));
    }

    #[test]
    fn csv_output_is_exact_and_lf_terminated() {
        let traj = Trajectory::new(vec![0.0, 0.5], 2, vec![100.0, 0.0, 60.65, 39.35]);
        let text = trajectory_csv(&traj, &["new".to_string(), "open".to_string()]);
        assert_eq!(text, "t,new,open\n0,100,0\n0.5,60.65,39.35\n");
        // Values survive a round trip through the decimal form.
        let m = parse_matrix_csv(text.lines().skip(1).collect::<Vec<_>>().join("\n").as_str())
            .unwrap();
        assert_eq!(m.get(1, 1), 60.65);
    }
}
