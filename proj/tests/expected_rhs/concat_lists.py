pd.concat([df['A'], df['B']], ignore_index=True)
