use std::fmt;

/// A 1-based line/column position in some source text.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pos {
    pub line: u32,
    pub column: u32,
}

impl Pos {
    pub fn new(line: u32, column: u32) -> Self {
        Pos { line, column }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.line, self.column)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
    Note,
}

/// Machine-checkable classification of a diagnostic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DiagCode {
    Syntax,
    DuplicateMap,
    SelectorOnNonGeneric,
    NoProductions,
    OracleSpelling,
    SubtokenInProduction,
    UndeclaredSubtoken,
    ErrorAsLhs,
    PrecWithoutLevel,
    MapNotCovering,
    UnknownMap,
    MapWithoutSelector,
    MultipleSelectors,
    DuplicateMapEntry,
    DuplicatePrecedence,
    UndefinedNonterminal,
    ReservedGoalName,
    Conflict,
    ErrorAmbiguity,
    ErrorLoop,
    Cyclic,
    UncoveredSubtoken,
    StateCap,
    ExternalScanner,
    Lexical,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: DiagCode,
    pub pos: Option<Pos>,
    pub message: String,
}

impl Diagnostic {
    pub fn error(code: DiagCode, pos: Option<Pos>, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Error, code, pos, message: message.into() }
    }

    pub fn warning(code: DiagCode, pos: Option<Pos>, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, code, pos, message: message.into() }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Note => "note",
        };
        match self.pos {
            Some(p) => write!(f, "{} at line {}: {}", sev, p, self.message),
            None => write!(f, "{}: {}", sev, self.message),
        }
    }
}
