const OPEN: &str = "<answer>";
const CLOSE: &str = "</answer>";

/// Content of the last well-formed `<answer>...</answer>` span, trimmed.
///
/// A span is an opening tag followed by the nearest closing tag; an opening
/// tag with no closing tag after it is ignored.
pub fn extract_answer(text: &str) -> Option<String> {
    let mut last = None;
    let mut rest = text;
    while let Some(open) = rest.find(OPEN) {
        let body = &rest[open + OPEN.len()..];
        let Some(close) = body.find(CLOSE) else { break };
        let inner = &body[..close];
        // A later opening tag inside the span means the earlier one was
        // never closed; the span starts at the innermost opening tag.
        let inner = inner.rfind(OPEN).map_or(inner, |i| &inner[i + OPEN.len()..]);
        last = Some(inner.trim().to_string());
        rest = &body[close + CLOSE.len()..];
    }
    last
}
