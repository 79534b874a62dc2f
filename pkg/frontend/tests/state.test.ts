import { describe, expect, it } from "vitest";

import type { ModelInfo } from "../src/api.js";
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
  sentencesRequired,
  setSentenceA,
  setSentenceB,
  withModels,
} from "../src/state.js";

const MODELS: ModelInfo[] = [
  { model_id: "desk", full_dim: 256, ladder: [256, 128, 64, 32] },
  { model_id: "tiny", full_dim: 64, ladder: [64, 32, 16] },
];

function readyState() {
  let state = withModels(initialState(), MODELS);
  state = setSentenceA(state, "the cat sat");
  state = setSentenceB(state, 0, "a cat was sitting");
  return state;
}

describe("initialState", () => {
  it("starts in pair mode with one empty b sentence", () => {
    const state = initialState();
    expect(state.mode).toBe("pair");
    expect(state.sentencesB).toEqual([""]);
    expect(state.scores).toBeNull();
    expect(canSubmit(state)).toBe(false);
  });
});

describe("withModels", () => {
  it("selects the first model at its full dimension", () => {
    const state = withModels(initialState(), MODELS);
    expect(state.modelId).toBe("desk");
    expect(state.dim).toBe(256);
    expect(ladderOf(state)).toEqual([256, 128, 64, 32]);
  });

  it("leaves selection empty for an empty listing", () => {
    const state = withModels(initialState(), []);
    expect(state.modelId).toBeNull();
    expect(state.dim).toBeNull();
    expect(canSubmit(state)).toBe(false);
  });
});

describe("selectModel", () => {
  it("resets dim to the new model's full dimension", () => {
    let state = withModels(initialState(), MODELS);
    state = selectDim(state, 32);
    expect(state.dim).toBe(32);
    state = selectModel(state, "tiny");
    expect(state.modelId).toBe("tiny");
    expect(state.dim).toBe(64);
  });

  it("ignores unknown model ids", () => {
    const state = withModels(initialState(), MODELS);
    expect(selectModel(state, "nope")).toBe(state);
  });
});

describe("selectDim", () => {
  it("accepts any ladder dimension", () => {
    const state = withModels(initialState(), MODELS);
    for (const dim of [256, 128, 64, 32]) {
      expect(selectDim(state, dim).dim).toBe(dim);
    }
  });

  it("ignores dimensions outside the ladder", () => {
    const state = withModels(initialState(), MODELS);
    expect(selectDim(state, 48)).toBe(state);
    expect(selectDim(state, 512)).toBe(state);
    expect(currentModel(selectDim(state, 48))?.model_id).toBe("desk");
  });
});

describe("selectMode", () => {
  it("preserves sentence_a across the switch", () => {
    let state = readyState();
    state = selectMode(state, "one_vs_three");
    expect(state.sentenceA).toBe("the cat sat");
    state = selectMode(state, "pair");
    expect(state.sentenceA).toBe("the cat sat");
  });

  it("resizes the b sentences, keeping what stays visible", () => {
    let state = readyState();
    state = selectMode(state, "one_vs_three");
    expect(state.sentencesB).toEqual(["a cat was sitting", "", ""]);
    state = setSentenceB(state, 2, "third");
    state = selectMode(state, "pair");
    expect(state.sentencesB).toEqual(["a cat was sitting"]);
  });

  it("drops stale scores whose labeling no longer applies", () => {
    let state = completeRequest(readyState(), [0.9]);
    expect(state.scores).toEqual([0.9]);
    state = selectMode(state, "one_vs_three");
    expect(state.scores).toBeNull();
  });

  it("requires three candidates in one_vs_three", () => {
    expect(sentencesRequired("pair")).toBe(1);
    expect(sentencesRequired("one_vs_three")).toBe(3);
  });
});

describe("canSubmit", () => {
  it("is true once model, dim, and sentences are present", () => {
    expect(canSubmit(readyState())).toBe(true);
  });

  it("is false with an empty sentence_a", () => {
    const state = setSentenceA(readyState(), "");
    expect(canSubmit(state)).toBe(false);
  });

  it("is false with a blank third sentence in one_vs_three", () => {
    let state = selectMode(readyState(), "one_vs_three");
    state = setSentenceB(state, 1, "second");
    expect(canSubmit(state)).toBe(false);
    state = setSentenceB(state, 2, "third");
    expect(canSubmit(state)).toBe(true);
  });

  it("is false while a request is in flight", () => {
    const state = beginRequest(readyState());
    expect(canSubmit(state)).toBe(false);
  });

  it("counts whitespace as text since input goes out verbatim", () => {
    const state = setSentenceA(readyState(), "   ");
    expect(canSubmit(state)).toBe(true);
  });
});

describe("request lifecycle", () => {
  it("completeRequest stores scores and clears the flag", () => {
    let state = beginRequest(readyState());
    expect(state.inFlight).toBe(true);
    state = completeRequest(state, [0.73, 0.11, 0.42]);
    expect(state.inFlight).toBe(false);
    expect(state.scores).toEqual([0.73, 0.11, 0.42]);
    expect(state.error).toBeNull();
  });

  it("failRequest clears scores so stale numbers never linger", () => {
    let state = completeRequest(readyState(), [0.9]);
    state = failRequest(state, "sentence_a produces a zero-norm embedding");
    expect(state.scores).toBeNull();
    expect(state.error).toContain("sentence_a");
    expect(state.inFlight).toBe(false);
  });

  it("setSentenceB ignores out-of-range indexes", () => {
    const state = readyState();
    expect(setSentenceB(state, 2, "x")).toBe(state);
    expect(setSentenceB(state, -1, "x")).toBe(state);
  });
});
