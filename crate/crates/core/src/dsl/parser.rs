use std::collections::BTreeSet;

use super::lexer::{lex, Spanned, Tok};
use super::{ParseError, ParseErrors};
use crate::document::{validate_document, ModelDocument};
use crate::dynamics::{
    BehaviorEdge, BehaviorModel, Classification, Component, EdgeKind, Effect, EffectOp, ElementRef, EventDef, Region,
    Relates,
};
use crate::guard::{CmpOp, Guard, Operand, Value};
use crate::model::{
    ActionKind, ActionRef, Bound, FlowArc, Form, SlotKind, Stage, StateSlot, StaticModel, Thimac, ThimacId, TriggerArc,
};
use crate::report::ValidationReport;

/// Names that cannot be used for thimacs, events or attributes.
pub(crate) const RESERVED: &[&str] = &[
    "create", "process", "release", "transfer", "receive", "and", "or", "not", "true", "false",
];

const SECTIONS: &[&str] = &["static", "events", "behavior", "params"];

const STATEMENTS: &[&str] = &[
    "thimac",
    "flow",
    "trigger",
    "event",
    "instance",
    "component",
    "counter",
    "queue",
    "flag",
    "attr",
    "create",
    "process",
    "release",
    "transfer",
    "receive",
];

/// A parsed document and the result of validating it.
#[derive(Debug, Clone)]
pub struct Parsed {
    pub document: ModelDocument,
    pub report: ValidationReport,
}

/// Parses `.tm` source. Syntax errors are returned with positions; a
/// syntactically valid document is always returned together with its
/// validation report, even when that report has errors.
pub fn parse(src: &str) -> Result<Parsed, ParseErrors> {
    let (toks, lex_errors) = lex(src);
    let mut p = Parser {
        toks,
        pos: 0,
        errors: lex_errors,
    };
    let doc = p.document();
    if !p.errors.is_empty() {
        let mut errors = p.errors;
        errors.sort_by_key(|e| (e.line, e.column));
        return Err(ParseErrors(errors));
    }
    let mut doc = doc;
    doc.canonicalize();
    let report = validate_document(&doc);
    Ok(Parsed { document: doc, report })
}

type PResult<T> = Result<T, ParseError>;

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    errors: Vec<ParseError>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err_here(&self, message: impl Into<String>, expected: &[&str]) -> ParseError {
        let s = &self.toks[self.pos];
        ParseError::new(
            s.line,
            s.column,
            message,
            expected.iter().map(|e| e.to_string()).collect(),
        )
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        self.err_here(format!("unexpected {}", self.peek().describe()), expected)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> PResult<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(self.unexpected(&[&format!("`{}`", t.symbol())]))
        }
    }

    fn name(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            Tok::Ident(s) => Err(self.err_here(format!("`{s}` is a reserved word"), &["a name"])),
            _ => Err(self.unexpected(&["a name"])),
        }
    }

    fn label(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Str(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.name(),
        }
    }

    fn int(&mut self) -> PResult<i64> {
        match self.peek().clone() {
            Tok::Int(i) => {
                self.bump();
                Ok(i)
            }
            _ => Err(self.unexpected(&["an integer"])),
        }
    }

    fn annotation(&mut self) -> PResult<Option<u32>> {
        if !self.eat(&Tok::Hash) {
            return Ok(None);
        }
        let i = self.int()?;
        u32::try_from(i)
            .map(Some)
            .map_err(|_| self.err_here("annotation must be a non-negative integer", &[]))
    }

    fn at_statement_boundary(&self) -> bool {
        match self.peek() {
            Tok::RBrace | Tok::Eof => true,
            Tok::Ident(s) => STATEMENTS.contains(&s.as_str()) || SECTIONS.contains(&s.as_str()),
            _ => false,
        }
    }

    /// Skips to the next statement start (or closing brace) at the current
    /// nesting depth. Always consumes at least one token.
    fn recover(&mut self) {
        let mut depth = 0usize;
        let mut first = true;
        loop {
            if !first && depth == 0 && self.at_statement_boundary() {
                return;
            }
            if *self.peek() == Tok::Eof {
                return;
            }
            match self.bump() {
                Tok::LBrace => depth += 1,
                Tok::RBrace if depth > 0 => depth -= 1,
                Tok::RBrace if first => return,
                _ => {}
            }
            first = false;
        }
    }

    fn record(&mut self, e: ParseError) {
        self.errors.push(e);
        self.recover();
    }

    /// Runs `item` until the closing brace of the current block.
    fn block(&mut self, mut item: impl FnMut(&mut Self) -> PResult<()>) {
        if let Err(e) = self.expect(Tok::LBrace) {
            self.record(e);
            return;
        }
        loop {
            while self.eat(&Tok::Semi) {}
            match self.peek() {
                Tok::RBrace => {
                    self.bump();
                    return;
                }
                Tok::Eof => {
                    let e = self.unexpected(&["`}`"]);
                    self.errors.push(e);
                    return;
                }
                Tok::Ident(s) if SECTIONS.contains(&s.as_str()) => {
                    let e = self.err_here("missing `}` before next section", &["`}`"]);
                    self.errors.push(e);
                    return;
                }
                _ => {}
            }
            if let Err(e) = item(self) {
                self.record(e);
            }
        }
    }

    fn document(&mut self) -> ModelDocument {
        let mut doc = ModelDocument::default();
        let mut seen = BTreeSet::new();
        if *self.peek() == Tok::Eof {
            let e = self.err_here("empty document", &["a section"]);
            self.errors.push(e);
        }
        while *self.peek() != Tok::Eof {
            while self.eat(&Tok::Semi) {}
            let section = match self.peek() {
                Tok::Ident(s) if SECTIONS.contains(&s.as_str()) => s.clone(),
                Tok::Eof => break,
                _ => {
                    let e = self.unexpected(&["`static`", "`events`", "`behavior`", "`params`"]);
                    self.record(e);
                    continue;
                }
            };
            if !seen.insert(section.clone()) {
                let e = self.err_here(format!("duplicate `{section}` section"), &[]);
                self.errors.push(e);
            }
            self.bump();
            match section.as_str() {
                "static" => self.static_section(&mut doc.static_model),
                "events" => self.events_section(&mut doc.events),
                "behavior" => doc.behavior = Some(self.behavior_section()),
                _ => self.params_section(&mut doc),
            }
        }
        doc
    }

    fn params_section(&mut self, doc: &mut ModelDocument) {
        self.block(|p| {
            let name = p.name()?;
            p.expect(Tok::Eq)?;
            let v = p.literal()?;
            doc.params.insert(name, v);
            Ok(())
        });
    }

    fn literal(&mut self) -> PResult<Value> {
        match self.peek().clone() {
            Tok::Int(i) => {
                self.bump();
                Ok(Value::Int(i))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(Value::Str(s))
            }
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                Ok(Value::Bool(s == "true"))
            }
            _ => Err(self.unexpected(&["a literal"])),
        }
    }

    fn static_section(&mut self, model: &mut StaticModel) {
        if self.eat_kw("simplified") {
            model.form = Form::Simplified;
        } else {
            self.eat_kw("full");
        }
        self.block(|p| {
            if p.eat_kw("thimac") {
                p.thimac(None, &mut model.thimacs)
            } else if p.eat_kw("flow") {
                let f = p.flow()?;
                model.flows.push(f);
                Ok(())
            } else if p.eat_kw("trigger") {
                let t = p.trigger()?;
                model.triggers.push(t);
                Ok(())
            } else {
                Err(p.unexpected(&["`thimac`", "`flow`", "`trigger`"]))
            }
        });
    }

    fn thimac(&mut self, parent: Option<&ThimacId>, out: &mut Vec<Thimac>) -> PResult<()> {
        let name = self.name()?;
        let id = match parent {
            Some(p) => p.child(&name),
            None => ThimacId::new(name.clone()),
        };
        let mut t = Thimac::new(id.0.clone(), parent.cloned());
        t.name = name;
        if self.eat(&Tok::Colon) {
            t.class = Some(self.label()?);
        }
        t.annotation = self.annotation()?;
        let mut children = Vec::new();
        self.block(|p| {
            let Tok::Ident(kw) = p.peek().clone() else {
                return Err(p.unexpected(&["a stage", "a slot", "`attr`", "`thimac`"]));
            };
            if let Ok(kind) = kw.parse::<ActionKind>() {
                p.bump();
                let annotation = p.annotation()?;
                t.stages.push(Stage { kind, annotation });
                return Ok(());
            }
            p.bump();
            match kw.as_str() {
                "counter" => {
                    let name = p.name()?;
                    let initial = if p.eat(&Tok::Eq) { p.int()? } else { 0 };
                    let max = if p.eat_kw("max") {
                        if p.eat(&Tok::Dollar) {
                            Some(Bound::Param(p.name()?))
                        } else {
                            Some(Bound::Literal(p.int()?))
                        }
                    } else {
                        None
                    };
                    t.slots.push(StateSlot {
                        name,
                        kind: SlotKind::Counter { initial, max },
                    });
                }
                "queue" => {
                    let name = p.name()?;
                    t.slots.push(StateSlot {
                        name,
                        kind: SlotKind::Queue,
                    });
                }
                "flag" => {
                    let name = p.name()?;
                    let initial = if p.eat(&Tok::Eq) {
                        match p.literal()? {
                            Value::Bool(b) => b,
                            _ => return Err(p.err_here("flag initial value must be a boolean", &[])),
                        }
                    } else {
                        false
                    };
                    t.slots.push(StateSlot {
                        name,
                        kind: SlotKind::Flag { initial },
                    });
                }
                "attr" => loop {
                    t.attributes.insert(p.name()?);
                    if !p.eat(&Tok::Comma) {
                        break;
                    }
                },
                "thimac" => p.thimac(Some(&t.id), &mut children)?,
                _ => {
                    p.pos -= 1;
                    return Err(p.unexpected(&["a stage", "a slot", "`attr`", "`thimac`"]));
                }
            }
            Ok(())
        });
        out.push(t);
        out.extend(children);
        Ok(())
    }

    fn path(&mut self) -> PResult<Vec<String>> {
        let mut segs = vec![self.name()?];
        while *self.peek() == Tok::Dot {
            self.bump();
            match self.peek().clone() {
                Tok::Ident(s) if s.parse::<ActionKind>().is_ok() => {
                    self.bump();
                    segs.push(s);
                    break;
                }
                _ => segs.push(self.name()?),
            }
        }
        Ok(segs)
    }

    fn element_path(&mut self) -> PResult<ElementRef> {
        let mut segs = self.path()?;
        let last = segs.last().cloned().unwrap_or_default();
        match last.parse::<ActionKind>() {
            Ok(kind) if segs.len() > 1 => {
                segs.pop();
                Ok(ElementRef::Stage(ActionRef {
                    thimac: ThimacId::new(segs.join(".")),
                    kind,
                }))
            }
            _ => Ok(ElementRef::Thimac(ThimacId::new(segs.join(".")))),
        }
    }

    fn action_ref(&mut self) -> PResult<ActionRef> {
        match self.element_path()? {
            ElementRef::Stage(s) => Ok(s),
            _ => Err(self.err_here(
                "expected an action reference ending in an action kind",
                &["`.create`", "`.process`", "`.release`", "`.transfer`", "`.receive`"],
            )),
        }
    }

    fn flow(&mut self) -> PResult<FlowArc> {
        let source = self.action_ref()?;
        self.expect(Tok::Arrow)?;
        let target = self.action_ref()?;
        let thing_label = if self.eat_kw("as") { Some(self.label()?) } else { None };
        let annotation = self.annotation()?;
        Ok(FlowArc {
            source,
            target,
            thing_label,
            annotation,
        })
    }

    fn trigger(&mut self) -> PResult<TriggerArc> {
        let source = self.action_ref()?;
        self.expect(Tok::DashArrow)?;
        let target = self.action_ref()?;
        let annotation = self.annotation()?;
        let label = if self.eat_kw("label") {
            match self.bump() {
                Tok::Str(s) => Some(s),
                _ => {
                    self.pos -= 1;
                    return Err(self.unexpected(&["a string"]));
                }
            }
        } else {
            None
        };
        let guard = if self.eat_kw("when") { Some(self.guard()?) } else { None };
        Ok(TriggerArc {
            source,
            target,
            guard,
            label,
            annotation,
        })
    }

    fn guard(&mut self) -> PResult<Guard> {
        let mut g = self.conj()?;
        while self.eat_kw("or") {
            g = Guard::Or(Box::new(g), Box::new(self.conj()?));
        }
        Ok(g)
    }

    fn conj(&mut self) -> PResult<Guard> {
        let mut g = self.neg()?;
        while self.eat_kw("and") {
            g = Guard::And(Box::new(g), Box::new(self.neg()?));
        }
        Ok(g)
    }

    fn neg(&mut self) -> PResult<Guard> {
        if self.eat_kw("not") {
            return Ok(Guard::Not(Box::new(self.neg()?)));
        }
        if self.eat(&Tok::LParen) {
            let g = self.guard()?;
            self.expect(Tok::RParen)?;
            return Ok(g);
        }
        let lhs = self.operand()?;
        let op = match self.peek() {
            Tok::Eq => CmpOp::Eq,
            Tok::Ne => CmpOp::Ne,
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            _ => return Ok(Guard::Atom(lhs)),
        };
        self.bump();
        let rhs = self.operand()?;
        Ok(Guard::Cmp(op, lhs, rhs))
    }

    fn operand(&mut self) -> PResult<Operand> {
        match self.peek().clone() {
            Tok::Int(_) | Tok::Str(_) => Ok(Operand::Lit(self.literal()?)),
            Tok::Ident(s) if s == "true" || s == "false" => Ok(Operand::Lit(self.literal()?)),
            Tok::Dollar => {
                self.bump();
                Ok(Operand::Param(self.name()?))
            }
            Tok::Ident(_) => {
                let mut segs = vec![self.name()?];
                while self.eat(&Tok::Dot) {
                    segs.push(self.name()?);
                }
                if segs.len() == 1 {
                    Ok(Operand::Attr(segs.remove(0)))
                } else {
                    Ok(Operand::Slot(segs.join(".")))
                }
            }
            _ => Err(self.unexpected(&["an operand"])),
        }
    }

    fn events_section(&mut self, events: &mut Vec<EventDef>) {
        self.block(|p| {
            let classification = if p.eat_kw("event") {
                Classification::Event
            } else if p.eat_kw("instance") {
                Classification::Instance
            } else {
                return Err(p.unexpected(&["`event`", "`instance`"]));
            };
            let id = p.name()?;
            let label = match p.peek().clone() {
                Tok::Str(s) => {
                    p.bump();
                    Some(s)
                }
                _ => None,
            };
            p.expect(Tok::Eq)?;
            p.expect(Tok::LBrace)?;
            let mut elements = Vec::new();
            if !p.eat(&Tok::RBrace) {
                loop {
                    let first = p.element_path()?;
                    let element = match (p.peek().clone(), &first) {
                        (Tok::Arrow | Tok::DashArrow, ElementRef::Stage(a)) => {
                            let trigger = p.bump() == Tok::DashArrow;
                            let b = p.action_ref()?;
                            if trigger {
                                ElementRef::Trigger(a.clone(), b)
                            } else {
                                ElementRef::Flow(a.clone(), b)
                            }
                        }
                        (Tok::Arrow | Tok::DashArrow, _) => {
                            return Err(p.err_here("arc endpoints must be action references", &[]))
                        }
                        _ => first,
                    };
                    elements.push(element);
                    if p.eat(&Tok::RBrace) {
                        break;
                    }
                    p.expect(Tok::Comma)?;
                }
            }
            let relates = if p.eat_kw("relates") {
                let from = p.name()?;
                let mutual = match p.bump() {
                    Tok::Arrow => false,
                    Tok::BiArrow => true,
                    _ => {
                        p.pos -= 1;
                        return Err(p.unexpected(&["`->`", "`<->`"]));
                    }
                };
                let to = p.name()?;
                Some(Relates { from, to, mutual })
            } else {
                None
            };
            let mut effects = Vec::new();
            if p.eat_kw("do") {
                loop {
                    let op = match p.peek().clone() {
                        Tok::Ident(s) => EffectOp::ALL.into_iter().find(|o| o.as_str() == s),
                        _ => None,
                    };
                    let Some(op) = op else {
                        return Err(p.unexpected(&["an effect such as `inc` or `push`"]));
                    };
                    p.bump();
                    let segs = p.path()?;
                    if segs.len() < 2 {
                        return Err(p.err_here("effect target must be `Thimac.slot`", &[]));
                    }
                    effects.push(Effect {
                        op,
                        slot: segs.join("."),
                    });
                    if !p.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            let mut region = Region::new(elements);
            region.complete_endpoints();
            events.push(EventDef {
                id,
                label,
                region,
                classification,
                effects,
                relates,
            });
            Ok(())
        });
    }

    fn behavior_section(&mut self) -> BehaviorModel {
        let mut b = BehaviorModel::default();
        self.block(|p| {
            if !p.eat_kw("component") {
                return Err(p.unexpected(&["`component`"]));
            }
            let name = p.name()?;
            let mut members = BTreeSet::new();
            let mut edges = Vec::new();
            p.block(|p| {
                let mut prev = p.name()?;
                members.insert(prev.clone());
                loop {
                    let kind = match p.peek() {
                        Tok::Arrow => EdgeKind::Sequence,
                        Tok::FatArrow => EdgeKind::Repeat,
                        _ => break,
                    };
                    p.bump();
                    let next = p.name()?;
                    members.insert(next.clone());
                    edges.push(BehaviorEdge {
                        from: prev,
                        to: next.clone(),
                        kind,
                    });
                    prev = next;
                }
                Ok(())
            });
            b.components.push(Component { name, members });
            b.edges.extend(edges);
            Ok(())
        });
        b
    }
}
