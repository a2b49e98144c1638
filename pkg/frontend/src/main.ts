import { ApiError, compare, fetchModels, ModelInfo } from './api.js';
import { countWords, debounce, parseGoldField, renderPanel } from './view.js';

const BASE = '';

const textInput = document.getElementById('text') as HTMLTextAreaElement;
const goldInput = document.getElementById('gold') as HTMLInputElement;
const banner = document.getElementById('banner') as HTMLDivElement;
const goldNote = document.getElementById('gold-note') as HTMLDivElement;
const chipRow = document.getElementById('models') as HTMLDivElement;
const panels = document.getElementById('panels') as HTMLDivElement;

let models: ModelInfo[] = [];
const selected = new Set<string>();
let inFlight: AbortController | null = null;
let requestSeq = 0;

function showBanner(message: string) {
  banner.textContent = message;
  banner.hidden = false;
}

function clearBanner() {
  banner.hidden = true;
}

function renderChips() {
  chipRow.innerHTML = '';
  for (const m of models) {
    const chip = document.createElement('button');
    chip.type = 'button';
    chip.className = selected.has(m.id) ? 'chip chip-on' : 'chip';
    chip.textContent = `${m.id} · ${m.mode} · ${m.vocab_size}`;
    chip.addEventListener('click', () => {
      if (selected.has(m.id)) {
        selected.delete(m.id);
      } else {
        selected.add(m.id);
      }
      renderChips();
      refresh();
    });
    chipRow.appendChild(chip);
  }
  const none = selected.size === 0;
  textInput.disabled = none;
  goldInput.disabled = none;
}

async function refresh() {
  const none = selected.size === 0;
  textInput.disabled = none;
  goldInput.disabled = none;
  if (inFlight) {
    inFlight.abort();
    inFlight = null;
  }
  const text = textInput.value;
  if (none || !text.trim()) {
    panels.innerHTML = '';
    goldNote.hidden = true;
    return;
  }
  let gold = parseGoldField(goldInput.value);
  if (gold && gold.length !== countWords(text)) {
    goldNote.textContent =
      `gold has ${gold.length} word(s) but the text has ${countWords(text)}; ignoring gold`;
    goldNote.hidden = false;
    gold = null;
  } else {
    goldNote.hidden = true;
  }
  const controller = new AbortController();
  inFlight = controller;
  const seq = ++requestSeq;
  const order = models.map((m) => m.id).filter((id) => selected.has(id));
  try {
    const resp = await compare(BASE, order, text, gold, controller.signal);
    if (seq !== requestSeq) {
      return;
    }
    clearBanner();
    panels.innerHTML = resp.results.map((r) => renderPanel(r, gold)).join('');
  } catch (err: any) {
    if (err?.name === 'AbortError') {
      return;
    }
    if (seq !== requestSeq) {
      return;
    }
    panels.innerHTML = '';
    if (err instanceof ApiError) {
      showBanner(err.message);
    } else {
      showBanner(`service unreachable: ${err?.message ?? err}`);
    }
  }
}

const refreshSoon = debounce(refresh, 250);
textInput.addEventListener('input', refreshSoon);
goldInput.addEventListener('input', refreshSoon);

fetchModels(BASE)
  .then((list) => {
    models = list;
    for (const m of models) {
      selected.add(m.id);
    }
    renderChips();
    clearBanner();
  })
  .catch((err) => {
    showBanner(`service unreachable: ${err?.message ?? err}`);
  });
