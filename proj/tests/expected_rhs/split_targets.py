print(...)
a, b, ls = [], [], df['C'].tolist()
for it in ls:
  spl = it.split('(', 1)
  a.append(spl[0])
  b.append(spl[1] if len(spl) > 1 else None)
a = pd.Series(a, df['C'].index)
b = pd.Series(b, df['C'].index)
