import type { Mode, ModelInfo } from "./api.js";

// Form state for the explorer page. Transitions are pure functions over a
// frozen-shape object so they can be tested without a DOM; main.ts owns
// applying them and re-rendering.

export interface UiState {
  models: ModelInfo[];
  modelId: string | null;
  dim: number | null;
  mode: Mode;
  sentenceA: string;
  sentencesB: string[]; // length 1 in pair mode, 3 in one_vs_three
  scores: number[] | null; // raw values from the last response
  inFlight: boolean;
  error: string | null;
}

export function initialState(): UiState {
  return {
    models: [],
    modelId: null,
    dim: null,
    mode: "pair",
    sentenceA: "",
    sentencesB: [""],
    scores: null,
    inFlight: false,
    error: null,
  };
}

export function sentencesRequired(mode: Mode): number {
  return mode === "pair" ? 1 : 3;
}

export function currentModel(state: UiState): ModelInfo | null {
  return state.models.find((m) => m.model_id === state.modelId) ?? null;
}

export function ladderOf(state: UiState): number[] {
  const model = currentModel(state);
  return model ? [...model.ladder] : [];
}

/** Install the model listing; selects the first model at its full dim. */
export function withModels(state: UiState, models: ModelInfo[]): UiState {
  const first = models.length > 0 ? models[0] : null;
  return {
    ...state,
    models: [...models],
    modelId: first ? first.model_id : null,
    dim: first ? first.full_dim : null,
    error: null,
  };
}

/** Switching models resets dim to the new model's full dimension. */
export function selectModel(state: UiState, modelId: string): UiState {
  const model = state.models.find((m) => m.model_id === modelId);
  if (!model) {
    return state;
  }
  return { ...state, modelId, dim: model.full_dim };
}

/** dim must come from the selected model's ladder; anything else is ignored. */
export function selectDim(state: UiState, dim: number): UiState {
  const model = currentModel(state);
  if (!model || !model.ladder.includes(dim)) {
    return state;
  }
  return { ...state, dim };
}

/**
 * Mode switch keeps sentence_a and any b sentences that remain visible;
 * stale scores are dropped because their labeling no longer applies.
 */
export function selectMode(state: UiState, mode: Mode): UiState {
  if (mode === state.mode) {
    return state;
  }
  const needed = sentencesRequired(mode);
  const sentencesB = Array.from(
    { length: needed },
    (_, i) => state.sentencesB[i] ?? "",
  );
  return { ...state, mode, sentencesB, scores: null };
}

export function setSentenceA(state: UiState, text: string): UiState {
  return { ...state, sentenceA: text };
}

export function setSentenceB(state: UiState, index: number, text: string): UiState {
  if (index < 0 || index >= state.sentencesB.length) {
    return state;
  }
  const sentencesB = [...state.sentencesB];
  sentencesB[index] = text;
  return { ...state, sentencesB };
}

/**
 * Submit stays disabled while a request is in flight or any required
 * sentence field is empty. Whitespace counts as text: input goes to the
 * server verbatim and normalization is its concern.
 */
export function canSubmit(state: UiState): boolean {
  if (state.inFlight || state.modelId === null || state.dim === null) {
    return false;
  }
  if (state.sentenceA === "") {
    return false;
  }
  return state.sentencesB.every((s) => s !== "");
}

export function beginRequest(state: UiState): UiState {
  return { ...state, inFlight: true, error: null };
}

export function completeRequest(state: UiState, scores: number[]): UiState {
  return { ...state, inFlight: false, scores: [...scores], error: null };
}

/** Failed comparisons clear the score panel so stale numbers never linger. */
export function failRequest(state: UiState, message: string): UiState {
  return { ...state, inFlight: false, scores: null, error: message };
}
