/*
 * Pure display logic: parsing the gold-segmentation field, validating the
 * offset contract, and building HTML for the comparison panels. Nothing in
 * here tokenizes; every token, offset, and mu_e value comes verbatim from
 * the service response.
 */

import { TokenizeResult, WordResult } from './api.js';

export const UNK = '<unk>';

export interface TokenSpan {
  /** Token string exactly as the service returned it. */
  token: string;
  /** Slice of the normalized text covered by the span. */
  text: string;
  start: number;
  end: number;
  unk: boolean;
  violating: boolean;
}

export interface WordSpans {
  spans: TokenSpan[];
  /** Offset-contract breaches; empty against a well-behaved service. */
  problems: string[];
}

/**
 * Parse the gold input field: words separated by whitespace, morphemes
 * within a word separated by '|'. Returns null for a blank field. Whether
 * morphemes actually concatenate to the typed words is the service's call,
 * reported back per word.
 */
export function parseGoldField(raw: string): string[][] | null {
  const trimmed = raw.trim();
  if (!trimmed) {
    return null;
  }
  return trimmed.split(/\s+/).map((word) => word.split('|'));
}

/** Whitespace word count, matching how the service splits text. */
export function countWords(text: string): number {
  const trimmed = text.trim();
  return trimmed ? trimmed.split(/\s+/).length : 0;
}

/**
 * Word-relative positions of the morpheme boundaries (exclusive of the two
 * word edges), for drawing tick marks.
 */
export function goldTickPositions(morphemes: string[]): number[] {
  const ticks: number[] = [];
  let pos = 0;
  for (const m of morphemes.slice(0, -1)) {
    pos += m.length;
    ticks.push(pos);
  }
  return ticks;
}

/**
 * Check one word's spans against the offset contract: spans tile the word
 * contiguously (no gaps, no overlaps), and each span's slice of the
 * normalized text matches the token string, UNK aside.
 */
export function buildWordSpans(word: WordResult, normalizedText: string): WordSpans {
  const problems: string[] = [];
  const spans: TokenSpan[] = [];
  const { tokens, offsets } = word;
  if (tokens.length !== offsets.length || tokens.length !== word.ids.length) {
    problems.push(
      `token/id/offset counts disagree (${tokens.length}/${word.ids.length}/${offsets.length})`
    );
    return { spans, problems };
  }
  if (offsets.length === 0) {
    problems.push('word has no spans');
    return { spans, problems };
  }
  const wordStart = offsets[0][0];
  let cursor = wordStart;
  for (let i = 0; i < offsets.length; i++) {
    const [start, end] = offsets[i];
    if (start !== cursor) {
      const kind = start > cursor ? 'gap' : 'overlap';
      problems.push(`${kind} before token ${i} (${cursor} vs ${start})`);
    }
    if (end <= start) {
      problems.push(`empty span at token ${i}`);
    }
    if (end > normalizedText.length) {
      problems.push(`span ${start}:${end} runs past the text`);
    }
    const text = normalizedText.slice(start, end);
    const unk = tokens[i] === UNK;
    if (!unk && text !== tokens[i]) {
      problems.push(`token ${i} is ${JSON.stringify(tokens[i])} but covers ${JSON.stringify(text)}`);
    }
    spans.push({
      token: tokens[i],
      text,
      start,
      end,
      unk,
      violating: word.violations?.[i] ?? false,
    });
    cursor = end;
  }
  if (cursor - wordStart !== word.word.length) {
    problems.push(
      `spans cover ${cursor - wordStart} characters of a ${word.word.length}-character word`
    );
  }
  return { spans, problems };
}

export function escapeHtml(s: string): string {
  return s
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

function spanHtml(span: TokenSpan, index: number, ticks: number[], wordStart: number): string {
  const classes = ['token'];
  classes.push(index % 2 === 0 ? 'token-even' : 'token-odd');
  if (span.unk) {
    classes.push('token-unk');
  }
  if (span.violating) {
    classes.push('token-violating');
  }
  const relStart = span.start - wordStart;
  const relEnd = span.end - wordStart;
  if (ticks.includes(relStart)) {
    classes.push('tick-before');
  }
  // A tick strictly inside the span marks exactly where a boundary is crossed.
  let inner = '';
  let prev = relStart;
  for (const t of ticks) {
    if (t > relStart && t < relEnd) {
      inner += escapeHtml(span.text.slice(prev - relStart, t - relStart));
      inner += '<span class="tick"></span>';
      prev = t;
    }
  }
  inner += escapeHtml(span.text.slice(prev - relStart));
  const title = span.violating ? `${span.token} (crosses a morpheme boundary)` : span.token;
  return `<span class="${classes.join(' ')}" title="${escapeHtml(title)}">${inner}</span>`;
}

export function renderWordRow(
  word: WordResult,
  normalizedText: string,
  gold: string[] | null
): string {
  const { spans, problems } = buildWordSpans(word, normalizedText);
  const wordStart = word.offsets.length ? word.offsets[0][0] : 0;
  const ticks = gold && word.gold_error === undefined ? goldTickPositions(gold) : [];
  const parts: string[] = ['<div class="word-row">'];
  parts.push('<span class="word-spans">');
  spans.forEach((span, i) => parts.push(spanHtml(span, i, ticks, wordStart)));
  parts.push('</span>');
  if (word.mu_e !== undefined) {
    parts.push(`<span class="mu-e" title="edit distance to gold morphemes">μₑ ${word.mu_e}</span>`);
  }
  if (word.gold_error !== undefined) {
    parts.push(`<span class="word-warning">${escapeHtml(word.gold_error)}</span>`);
  }
  for (const p of problems) {
    parts.push(`<span class="word-warning">offset contract: ${escapeHtml(p)}</span>`);
  }
  parts.push('</div>');
  return parts.join('');
}

export function renderPanel(result: TokenizeResult, gold: string[][] | null): string {
  const rows = result.words
    .map((w, i) => renderWordRow(w, result.normalized_text, gold ? gold[i] ?? null : null))
    .join('');
  return (
    `<section class="panel">` +
    `<h2>${escapeHtml(result.model_id)} <small>${escapeHtml(result.mode)}</small></h2>` +
    rows +
    `</section>`
  );
}

export function debounce<A extends unknown[]>(fn: (...args: A) => void, ms: number) {
  let timer: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    clearTimeout(timer);
    timer = setTimeout(() => fn(...args), ms);
  };
}
