import { ApiClient, ApiError } from "./api.js";
import type { Mode, SimilarityRequest } from "./api.js";
import { SessionLog } from "./log.js";
import {
  renderDimOptions,
  renderErrorBanner,
  renderLogEntries,
  renderModelOptions,
  renderScores,
  renderSweepTable,
} from "./render.js";
import { dimensionSweep } from "./sweep.js";
import {
  beginRequest,
  canSubmit,
  completeRequest,
  currentModel,
  failRequest,
  initialState,
  ladderOf,
  selectDim,
  selectMode,
  selectModel,
  setSentenceA,
  setSentenceB,
  withModels,
} from "./state.js";
import type { UiState } from "./state.js";

// Page wiring. All logic lives in the pure modules; this file only moves
// values between the DOM and the state object.

declare global {
  interface Window {
    NESTEMBED_BASE_URL?: string;
  }
}

const client = new ApiClient(window.NESTEMBED_BASE_URL ?? "");
const log = new SessionLog();
let state: UiState = initialState();

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

const modelSelect = el<HTMLSelectElement>("model");
const dimSelect = el<HTMLSelectElement>("dim");
const sentenceA = el<HTMLTextAreaElement>("sentence-a");
const sentenceBInputs = [
  el<HTMLTextAreaElement>("sentence-b-0"),
  el<HTMLTextAreaElement>("sentence-b-1"),
  el<HTMLTextAreaElement>("sentence-b-2"),
];
const submitButton = el<HTMLButtonElement>("submit");
const sweepButton = el<HTMLButtonElement>("sweep");
const scoresBox = el<HTMLElement>("scores");
const inlineError = el<HTMLElement>("inline-error");
const sweepBox = el<HTMLElement>("sweep-table");
const bannerBox = el<HTMLElement>("banner");
const logBox = el<HTMLElement>("session-log");

function apply(next: UiState): void {
  state = next;
  sync();
}

function sync(): void {
  const haveModels = state.models.length > 0;
  modelSelect.disabled = !haveModels || state.inFlight;
  dimSelect.disabled = !haveModels || state.inFlight;
  modelSelect.innerHTML = renderModelOptions(state.models, state.modelId);
  dimSelect.innerHTML = renderDimOptions(ladderOf(state), state.dim);

  if (sentenceA.value !== state.sentenceA) {
    sentenceA.value = state.sentenceA;
  }
  for (let i = 0; i < sentenceBInputs.length; i++) {
    const visible = i < state.sentencesB.length;
    const row = sentenceBInputs[i].closest(".field") as HTMLElement | null;
    if (row) {
      row.hidden = !visible;
    }
    if (visible && sentenceBInputs[i].value !== state.sentencesB[i]) {
      sentenceBInputs[i].value = state.sentencesB[i];
    }
  }

  submitButton.disabled = !canSubmit(state);
  sweepButton.disabled = !(state.mode === "pair" && canSubmit(state));

  scoresBox.innerHTML =
    state.scores === null ? "" : renderScores(state.scores, state.mode);
  inlineError.textContent = state.error ?? "";
  logBox.innerHTML = renderLogEntries(log.list());
}

function showBanner(message: string): void {
  bannerBox.innerHTML = renderErrorBanner(message);
  const retry = document.getElementById("retry");
  if (retry) {
    retry.addEventListener("click", () => {
      bannerBox.innerHTML = "";
      void loadModels();
    });
  }
}

async function loadModels(): Promise<void> {
  try {
    const models = await client.listModels();
    apply(withModels(state, models));
  } catch (err) {
    const message = err instanceof ApiError ? err.message : String(err);
    apply({ ...state, models: [], modelId: null, dim: null });
    showBanner(`could not load models: ${message}`);
  }
}

function requestFromState(): SimilarityRequest {
  return {
    model_id: state.modelId as string,
    dim: state.dim as number,
    mode: state.mode,
    sentence_a: state.sentenceA,
    sentences_b: [...state.sentencesB],
  };
}

async function submit(): Promise<void> {
  if (!canSubmit(state)) {
    return;
  }
  const request = requestFromState();
  apply(beginRequest(state));
  try {
    const response = await client.similarity(request);
    log.recordResponse(request, response);
    apply(completeRequest(state, response.scores));
  } catch (err) {
    const message = err instanceof ApiError ? err.message : String(err);
    log.recordError(request, message);
    apply(failRequest(state, message));
    if (err instanceof ApiError && (err.status === 0 || err.status >= 500)) {
      showBanner(message);
    }
  }
}

async function runSweep(): Promise<void> {
  if (state.mode !== "pair" || !canSubmit(state)) {
    return;
  }
  const model = currentModel(state);
  if (!model) {
    return;
  }
  apply(beginRequest(state));
  const rows = await dimensionSweep(
    client,
    log,
    model.model_id,
    model.ladder,
    state.sentenceA,
    state.sentencesB[0],
  );
  sweepBox.innerHTML = renderSweepTable(rows);
  apply({ ...state, inFlight: false });
}

modelSelect.addEventListener("change", () => {
  apply(selectModel(state, modelSelect.value));
});
dimSelect.addEventListener("change", () => {
  apply(selectDim(state, Number(dimSelect.value)));
});
for (const radio of document.querySelectorAll<HTMLInputElement>(
  'input[name="mode"]',
)) {
  radio.addEventListener("change", () => {
    if (radio.checked) {
      apply(selectMode(state, radio.value as Mode));
    }
  });
}
sentenceA.addEventListener("input", () => {
  apply(setSentenceA(state, sentenceA.value));
});
sentenceBInputs.forEach((input, i) => {
  input.addEventListener("input", () => {
    apply(setSentenceB(state, i, input.value));
  });
});
submitButton.addEventListener("click", () => {
  void submit();
});
sweepButton.addEventListener("click", () => {
  void runSweep();
});

sync();
void loadModels();
