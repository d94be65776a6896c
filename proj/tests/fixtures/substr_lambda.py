df['text'].apply(lambda x: 'needle' in x)
