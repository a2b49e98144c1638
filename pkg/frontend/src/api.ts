/*
 * Typed client for the tokenization service. All tokenization happens
 * server-side; this module only moves JSON.
 */

export interface ModelInfo {
  id: string;
  mode: string;
  vocab_size: number;
  language: string;
}

export interface WordResult {
  word: string;
  tokens: string[];
  ids: number[];
  offsets: [number, number][];
  mu_e?: number;
  violations?: boolean[];
  gold_error?: string;
}

export interface TokenizeResult {
  model_id: string;
  mode: string;
  normalized_text: string;
  words: WordResult[];
}

export interface CompareResponse {
  results: TokenizeResult[];
}

export class ApiError extends Error {
  constructor(message: string, public status: number) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(url, init);
  let body: any;
  try {
    body = await resp.json();
  } catch {
    throw new ApiError(`bad response from ${url} (${resp.status})`, resp.status);
  }
  if (!resp.ok) {
    throw new ApiError(body?.error ?? `request failed (${resp.status})`, resp.status);
  }
  return body as T;
}

export function fetchModels(base: string): Promise<ModelInfo[]> {
  return request<ModelInfo[]>(`${base}/models`);
}

export function compare(
  base: string,
  modelIds: string[],
  text: string,
  gold: string[][] | null,
  signal?: AbortSignal
): Promise<CompareResponse> {
  const payload: Record<string, unknown> = { model_ids: modelIds, text };
  if (gold !== null) {
    payload.gold_segmentation = gold;
  }
  return request<CompareResponse>(`${base}/compare`, {
    method: 'POST',
    headers: { 'Content-Type': 'application/json' },
    body: JSON.stringify(payload),
    signal,
  });
}
