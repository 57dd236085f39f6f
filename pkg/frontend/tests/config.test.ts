// The UI's whole contract with the service is the config JSON; every
// toggle must survive the round trip losslessly.

import { describe, expect, it } from "vitest";

import {
  type ChannelOrders,
  type SessionState,
  applyConfig,
  cropFromString,
  cropToString,
  initialState,
  toConfig,
} from "../src/config.js";

function uiFields(state: SessionState) {
  const { source, target, lastRecipe, lastResultUrl, ...rest } = state;
  return rest;
}

describe("config round trip", () => {
  it("defaults mirror the service defaults", () => {
    const cfg = toConfig(initialState());
    expect(cfg).toEqual({
      orders_i: 4,
      orders_p: 2,
      orders_t: 2,
      src_crop: null,
      tgt_crop: null,
      spectral: false,
      clamp: false,
    });
  });

  it("every toggle combination survives the round trip", () => {
    const orders: ChannelOrders[] = [0, 1, 2, 3, 4];
    for (const i of orders) {
      for (const p of orders) {
        for (const spectral of [false, true]) {
          for (const clamp of [false, true]) {
            const state: SessionState = {
              ...initialState(),
              ordersI: i,
              ordersP: p,
              ordersT: p,
              spectral,
              clamp,
              srcCrop: { x: 3, y: 5, w: 64, h: 48 },
              tgtCrop: null,
            };
            const back = applyConfig(initialState(), toConfig(state));
            expect(uiFields(back)).toEqual(uiFields(state));
          }
        }
      }
    }
  });

  it("serializes crops in the service's x,y,w,h form", () => {
    expect(cropToString({ x: 1, y: 2, w: 30, h: 40 })).toBe("1,2,30,40");
    expect(cropFromString("1,2,30,40")).toEqual({ x: 1, y: 2, w: 30, h: 40 });
  });

  it("rejects malformed crop strings", () => {
    expect(() => cropFromString("1,2,3")).toThrow();
    expect(() => cropFromString("a,b,c,d")).toThrow();
  });

  it("config JSON is stable under stringify/parse", () => {
    const state = { ...initialState(), spectral: true, ordersT: 1 as ChannelOrders };
    const cfg = toConfig(state);
    expect(JSON.parse(JSON.stringify(cfg))).toEqual(cfg);
  });
});
