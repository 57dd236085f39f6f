// Session state and its lossless mapping onto the service's transfer
// config JSON. The UI never does pixel math; everything it controls is in
// this structure.

export type CropRect = { x: number; y: number; w: number; h: number };

export type ChannelOrders = 0 | 1 | 2 | 3 | 4;

export interface TransferConfig {
  orders_i: ChannelOrders;
  orders_p: ChannelOrders;
  orders_t: ChannelOrders;
  src_crop: string | null;
  tgt_crop: string | null;
  spectral: boolean;
  clamp: boolean;
}

export interface SessionState {
  source: File | null;
  target: File | null;
  srcCrop: CropRect | null;
  tgtCrop: CropRect | null;
  ordersI: ChannelOrders;
  ordersP: ChannelOrders;
  ordersT: ChannelOrders;
  spectral: boolean;
  clamp: boolean;
  lastRecipe: unknown | null;
  lastResultUrl: string | null;
}

export function initialState(): SessionState {
  return {
    source: null,
    target: null,
    srcCrop: null,
    tgtCrop: null,
    ordersI: 4,
    ordersP: 2,
    ordersT: 2,
    spectral: false,
    clamp: false,
    lastRecipe: null,
    lastResultUrl: null,
  };
}

export function cropToString(c: CropRect): string {
  return `${c.x},${c.y},${c.w},${c.h}`;
}

export function cropFromString(text: string): CropRect {
  const parts = text.split(",").map((p) => Number.parseInt(p, 10));
  if (parts.length !== 4 || parts.some((v) => !Number.isInteger(v))) {
    throw new Error(`malformed crop ${JSON.stringify(text)}`);
  }
  const [x, y, w, h] = parts;
  return { x, y, w, h };
}

export function toConfig(state: SessionState): TransferConfig {
  return {
    orders_i: state.ordersI,
    orders_p: state.ordersP,
    orders_t: state.ordersT,
    src_crop: state.srcCrop ? cropToString(state.srcCrop) : null,
    tgt_crop: state.tgtCrop ? cropToString(state.tgtCrop) : null,
    spectral: state.spectral,
    clamp: state.clamp,
  };
}

export function applyConfig(state: SessionState, cfg: TransferConfig): SessionState {
  return {
    ...state,
    ordersI: cfg.orders_i,
    ordersP: cfg.orders_p,
    ordersT: cfg.orders_t,
    srcCrop: cfg.src_crop ? cropFromString(cfg.src_crop) : null,
    tgtCrop: cfg.tgt_crop ? cropFromString(cfg.tgt_crop) : null,
    spectral: cfg.spectral,
    clamp: cfg.clamp,
  };
}
